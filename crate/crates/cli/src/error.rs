use sfflab::SffError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] SffError),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{failed} of {total} verification checks failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    /// 1 for invalid configuration, 2 for runtime failures, 3 for a failed
    /// verification suite.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(SffError::InvalidArgument(_) | SffError::Config(_) | SffError::DimensionMismatch { .. }) => {
                1
            }
            CliError::Core(_) | CliError::Io { .. } => 2,
            CliError::VerifyFailed { .. } => 3,
        }
    }
}
