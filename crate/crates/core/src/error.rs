use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the channel model, scenario builder, solvers and
/// experiment pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a formula (non-positive
    /// distance, bandwidth, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid scenario or experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A filesystem operation failed.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
