use memvdp_core::SimError;
use thiserror::Error;

/// CLI-level errors, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error: {0}")]
    Validation(String),
    #[error("numerical error: {0}")]
    Numerical(SimError),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    /// Exit codes: 1 config error, 2 numerical divergence, 3 I/O error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidParameter { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}
