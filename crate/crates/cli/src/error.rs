use std::path::Path;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("config: {0}")]
    Config(String),

    #[error("time budget of {budget}s exceeded after {elapsed:.1}s ({context})")]
    Budget {
        budget: u64,
        elapsed: f64,
        context: String,
    },

    #[error(transparent)]
    Core(#[from] torus_density::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// 2 for usage, configuration and budget errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownExperiment(_) | CliError::Config(_) | CliError::Budget { .. } => 2,
            CliError::Core(_) | CliError::Io { .. } => 1,
        }
    }
}
