use std::path::PathBuf;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric argument violated its documented bound. `what` names the
    /// argument, `bound` states the bound it broke.
    #[error("{what} must satisfy {bound}, got {got}")]
    Domain {
        what: &'static str,
        bound: &'static str,
        got: f64,
    },

    #[error("dimension must satisfy 1 <= d <= {max}, got {got}", max = crate::MAX_DIM)]
    DimensionOutOfRange { got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, bound: &'static str, got: f64) -> Self {
        Error::Domain { what, bound, got }
    }
}
