use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Input(String),

    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Input(_) => 2,
            CliError::Write { .. } | CliError::Internal(_) => 1,
        }
    }
}

impl From<gridiv::Error> for CliError {
    fn from(e: gridiv::Error) -> Self {
        match e {
            gridiv::Error::RoundCap(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
