use thiserror::Error;

/// Harness errors, split by the exit code they map to.
#[derive(Debug, Error)]
pub enum BenchError {
    /// Bad flags, plan entries or hyperparameters.
    #[error("{0}")]
    Usage(String),

    /// Unreadable or invalid data.
    #[error("{0}")]
    Data(String),
}

impl BenchError {
    pub fn usage(msg: impl Into<String>) -> Self {
        BenchError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        BenchError::Data(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 1,
            BenchError::Data(_) => 2,
        }
    }
}

impl From<cascade_kde::Error> for BenchError {
    fn from(e: cascade_kde::Error) -> Self {
        match e {
            cascade_kde::Error::Config(_) => BenchError::Usage(e.to_string()),
            _ => BenchError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for BenchError {
    fn from(e: std::io::Error) -> Self {
        BenchError::Data(format!("I/O error: {e}"))
    }
}

pub type BenchResult<T> = std::result::Result<T, BenchError>;
