use std::process::ExitCode;

use thiserror::Error;

/// Failures surfaced to the shell. Input problems exit with 2; a reduction
/// whose certificate does not hold exits with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Violation(_) => ExitCode::from(3),
        }
    }
}

impl From<cspdich::Error> for CliError {
    fn from(e: cspdich::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
