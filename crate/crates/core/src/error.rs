use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("sampling failed after {attempts} attempts: {reason} (last candidate: {partial:?})")]
    Sampling {
        attempts: usize,
        reason: String,
        partial: Vec<String>,
    },

    #[error("no records for kinds in scope: {0:?}")]
    Coverage(Vec<String>),

    #[error("join error: {0}")]
    Join(String),

    #[error("unknown constraint kind `{0}`")]
    UnknownKind(String),

    #[error("synthetic model could not realize the requested verdicts: {0}")]
    Synthetic(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
