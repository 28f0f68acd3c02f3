use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::{EXIT_INFEASIBLE, EXIT_USAGE};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}: malformed config: {source}")]
    Config {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Core(#[from] kljn_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                kljn_core::Error::Infeasible { .. } | kljn_core::Error::SingularDenominator { .. },
            ) => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        }
    }
}
