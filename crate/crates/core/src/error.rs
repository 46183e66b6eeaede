use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: probability {value} outside [0, 1]")]
    InvalidProbability { line: usize, value: f64 },

    #[error("line {line}: weight scheme expects a probability column")]
    MissingProbability { line: usize },

    #[error("invalid binary graph cache: {0}")]
    Cache(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input violates a model constraint (e.g. LT in-weights summing above one).
    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("out of memory: {0}")]
    OutOfMemory(String),

    #[error("instance too large for exhaustive evaluation: {0}")]
    TooLarge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
