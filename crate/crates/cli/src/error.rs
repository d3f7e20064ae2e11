use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },

    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] obsassign::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit status: 2 usage, 3 invalid input, 4 runtime guard, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        use obsassign::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse { .. } | CliError::Validation(_) => 3,
            CliError::Core(E::InvalidScenario(_) | E::InsufficientSensors { .. } | E::EmptyTargets) => 3,
            CliError::Core(_) => 4,
            CliError::Io { .. } => 5,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
