use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("initial conductance spread is zero; set `array.s_norm_override` to map weights")]
    ZeroSpread,

    #[error("network too large to enumerate exactly ({n_visible} visible, {n_hidden} hidden)")]
    TooLarge { n_visible: usize, n_hidden: usize },

    #[error("{missing} missing pixels exceeds the enumeration limit of {limit}")]
    TooManyMissing { missing: usize, limit: usize },

    #[error("n_patterns = {requested} outside [1, {available}]")]
    OutOfRange { requested: usize, available: usize },

    #[error("invalid pattern string {0:?}")]
    BadPattern(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
