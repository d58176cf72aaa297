use confnet_core::Error as CoreError;
use thiserror::Error;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPABILITY: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Capability(String),
    #[error("{0} check(s) failed")]
    ValidationFailed(usize),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Capability(_) => EXIT_CAPABILITY,
            CliError::ValidationFailed(_) => EXIT_VALIDATION,
            CliError::Io(_) | CliError::Numerical(_) => EXIT_FAILURE,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Capability(_) => CliError::Capability(e.to_string()),
            CoreError::NonConvergence(_) | CoreError::Overflow(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
