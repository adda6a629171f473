use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("snapshot {index}: {source}")]
    Snapshot {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("node index {index} out of range for a network of {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("model {model} cannot be used with {reason}")]
    ModelMismatch { model: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid partition: {0}")]
    Partition(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
