use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{context}: expected {expected} {unit}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
        unit: &'static str,
    },

    #[error("{context}: non-finite value at index {index}")]
    NonFinite { context: &'static str, index: usize },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{0}")]
    Degenerate(String),

    #[error("{failures} of {total} bootstrap iterations failed (limit {limit}); first error: {first}")]
    TooManyFailures {
        failures: usize,
        total: usize,
        limit: usize,
        first: String,
    },

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: {message}")]
    DataFormat { path: PathBuf, message: String },

    // The cause is folded into Display rather than exposed as a source so
    // that chain-walking reporters print it exactly once.
    #[error("{path}: {cause}")]
    Io { path: PathBuf, cause: std::io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, cause: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            cause,
        }
    }
}
