use std::path::PathBuf;

use dirichlet_roots::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot build thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::BudgetExceeded { .. }) => 3,
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Threads(_) => 1,
        }
    }

    /// Extra guidance printed after the message.
    pub fn advisory(&self) -> Option<&'static str> {
        match self {
            CliError::Core(CoreError::BudgetExceeded { .. }) => {
                Some("use --method stratified (or lower --T) for cutoffs above a few thousand")
            }
            _ => None,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
