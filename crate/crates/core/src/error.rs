use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is zero (power iteration has nothing to converge to)")]
    ZeroOperator,

    /// Power iteration hit `max_iter`. Carries the last iterate so callers can
    /// still inspect it.
    #[error(
        "power iteration did not converge after {iterations} iterations \
         (last value {value}, relative change {relative_change:e})"
    )]
    NonConvergence {
        iterations: usize,
        value: f64,
        relative_change: f64,
        residual: f64,
        left: Vec<f64>,
    },

    #[error("matrix of order {order} exceeds the dense solver guard {limit}")]
    TooLarge { order: usize, limit: usize },

    #[error("shift inside spectrum: factorization failed at pivot {pivot}")]
    ShiftInsideSpectrum { pivot: usize },

    #[error("point {0} lies on the spectral support")]
    OnSupport(f64),

    #[error("bracket exhausted: no sign change up to x = {upper}")]
    BracketExhausted { upper: f64 },

    #[error("invalid axis set: {0}")]
    InvalidAxes(String),

    #[error("tensor with {entries} entries exceeds memory cap of {cap} entries")]
    MemoryCap { entries: u128, cap: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

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
