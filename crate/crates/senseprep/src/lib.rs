//! File formats, model artifacts and the command-line driver for
//! `senseprep-core`.

pub mod artifacts;
pub mod cli;
pub mod config;
mod error;
pub mod io;
pub mod reports;

pub use error::{check_schema, Error};
