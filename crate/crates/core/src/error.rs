use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Cholesky factorization failed even with the largest jitter.
    #[error(
        "cholesky failed for a {size}x{size} gram matrix (max jitter {max_jitter:e}, \
         diagonal range [{min_diag:e}, {max_diag:e}], diag ratio {diag_ratio:e})"
    )]
    Numerical { size: usize, max_jitter: f64, min_diag: f64, max_diag: f64, diag_ratio: f64 },

    #[error("negative predictive variance {0:e} exceeds round-off tolerance")]
    NegativeVariance(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("search budget exhausted before any iteration completed")]
    Timeout,

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse { row: usize, column: String, message: String },

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
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
