use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qcorr_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    StateFile {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid complex number {0:?}")]
    Complex(String),
    #[error("{0}")]
    Usage(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("write: {0}")]
    Write(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 for a failed reproduction, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(qcorr_core::Error::Reproduction { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
