use std::path::Path;

use qcvx_core::Error as CoreError;

/// Exit status 2 for bad input, 1 for a failed certificate or solve.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::NonFinite(_)
            | CoreError::ShapeMismatch { .. }
            | CoreError::Empty
            | CoreError::NotAdjointStructured(_)
            | CoreError::NotHermitian(_)
            | CoreError::InvalidArgument(_) => CliError::Input(err.to_string()),
            _ => CliError::Failure(err.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
