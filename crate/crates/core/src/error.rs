use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the inviscid-limit toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("CFL violation at t={t}: dt={dt} exceeds the advective limit {limit}")]
    Cfl { t: f64, dt: f64, limit: f64 },

    #[error("non-finite value detected at t={t} in {what}")]
    NonFinite { t: f64, what: String },

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("every sweep point failed")]
    SweepFailed,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
