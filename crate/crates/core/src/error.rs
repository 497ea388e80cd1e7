use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no data in window")]
    NoData,

    #[error("degenerate matrix: {0}")]
    Degenerate(String),

    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("unknown graph format {0:?} (expected graphml, dot or json)")]
    UnknownFormat(String),

    #[error("graph import error: {0}")]
    Import(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
