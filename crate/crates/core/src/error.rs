use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid network: {0}")]
    Network(String),
    #[error("invalid generator parameters: {0}")]
    Generator(String),
    #[error("invalid query: {0}")]
    Query(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("index file error: {0}")]
    Index(String),
    #[error("oracle refused: {0}")]
    OracleGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
