use thiserror::Error;

/// Errors raised by samplers, solvers and theory evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SffError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{what} did not converge (achieved error estimate {achieved:.3e})")]
    NonConvergence { what: String, achieved: f64 },

    #[error("eigensolver did not converge for matrix from seed {seed:#018x}, stream {stream}")]
    EigenNonConvergence { seed: u64, stream: u64 },
}

pub type Result<T> = std::result::Result<T, SffError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SffError::InvalidArgument(msg.into()))
}
