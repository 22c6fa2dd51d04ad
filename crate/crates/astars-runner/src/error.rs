use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {key}: {detail}")]
    Config { key: String, detail: String },

    #[error(transparent)]
    Core(#[from] astars_core::Error),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} of {total} gates failed")]
    GateFailure { failed: usize, total: usize },
}

impl CliError {
    pub fn config(key: impl Into<String>, detail: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            detail: detail.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 config, 2 gate or numeric failure, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        use astars_core::Error as E;
        match self {
            CliError::Config { .. } | CliError::Core(E::Config { .. } | E::Domain { .. }) => 1,
            CliError::GateFailure { .. } | CliError::Core(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
