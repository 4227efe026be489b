use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The hazard rate diverges at or beyond the end of a bounded support.
    #[error("hazard rate undefined at age {age}: support ends at {upper}")]
    OutsideSupport { age: f64, upper: f64 },

    #[error("distribution has infinite mean (GPD shape {0} >= 1)")]
    InfiniteMean(f64),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("cache size {capacity} exceeds catalog size {n}")]
    CacheTooLarge { capacity: usize, n: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
