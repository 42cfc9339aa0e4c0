use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// The message names the invariant that failed.
    #[error("invalid gauge: {0}")]
    InvalidGauge(String),
    #[error("invalid linear program: {0}")]
    InvalidProgram(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 3,
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
