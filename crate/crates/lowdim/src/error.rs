use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lowdim_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! from_core {
    ($($t:path),*) => {
        $(impl From<$t> for Error {
            fn from(e: $t) -> Self {
                Error::Core(e.into())
            }
        })*
    };
}

from_core!(
    lowdim_core::net::NetError,
    lowdim_core::approx::ApproxError,
    lowdim_core::geometry::GeometryError,
    lowdim_core::estimators::EstimatorError,
    lowdim_core::regression::RegressionError
);

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
