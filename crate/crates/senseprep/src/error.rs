use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] senseprep_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("row {row}, column {column:?}: cannot parse {value:?}")]
    Cell { row: usize, column: String, value: String },
    #[error("{0}")]
    Format(String),
    #[error("node ids differ at position {position}: expected {expected:?}, found {found:?}")]
    SchemaMismatch {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Short machine-readable category for the error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Core(_) => "data",
            Self::Io { .. } => "io",
            Self::Csv(_) | Self::Cell { .. } | Self::Format(_) => "format",
            Self::Json(_) => "json",
            Self::SchemaMismatch { .. } => "schema",
            Self::Config(_) => "config",
        }
    }
}

/// Checks that two node-id lists agree, naming the first difference.
pub fn check_schema(expected: &[String], found: &[String]) -> Result<(), Error> {
    let longest = expected.len().max(found.len());
    for position in 0..longest {
        let e = expected.get(position);
        let f = found.get(position);
        if e != f {
            return Err(Error::SchemaMismatch {
                position,
                expected: e.cloned().unwrap_or_else(|| "<none>".into()),
                found: f.cloned().unwrap_or_else(|| "<none>".into()),
            });
        }
    }
    Ok(())
}
