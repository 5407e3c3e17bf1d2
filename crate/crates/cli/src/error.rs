use std::path::Path;

use aperture_forge_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => exit::CONFIG,
            Self::Io { .. } => exit::IO,
            Self::Core(e) => match e {
                CoreError::InfeasibleConstraints(_) => exit::INFEASIBLE,
                CoreError::UnboundedCrb(_)
                | CoreError::UnboundedMseBound(_)
                | CoreError::UndefinedObjective(_)
                | CoreError::InvalidMatrix(_)
                | CoreError::NumericalFailure(_) => exit::NUMERICAL,
                CoreError::Io { .. } => exit::IO,
                CoreError::InvalidPortCount(_)
                | CoreError::UnsupportedPortCount(_)
                | CoreError::InvalidParameter(_)
                | CoreError::Parse { .. } => exit::CONFIG,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
