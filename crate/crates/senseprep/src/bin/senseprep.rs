use std::process::ExitCode;

use clap::Parser;
use senseprep::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            let report = serde_json::json!({ "error": err.to_string(), "kind": err.kind() });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
