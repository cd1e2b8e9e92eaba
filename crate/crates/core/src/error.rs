// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IdwError {
    #[error("no data points")]
    NoData,
    #[error("invalid coordinate")]
    InvalidCoordinate,
    #[error("layout requires double precision")]
    RequiresDouble,
    #[error("index out of bounds")]
    IndexOutOfBounds,
    #[error("empty component set")]
    EmptyComponents,
    #[error("empty reduction")]
    EmptyReduction,
    #[error("baseline not found")]
    BaselineNotFound,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl IdwError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IdwError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the caller's choice of arguments rather than
    /// by the environment (file system, malformed files).
    pub fn is_usage(&self) -> bool {
        !matches!(self, IdwError::Io { .. } | IdwError::Format(_))
    }
}

pub type Result<T, E = IdwError> = std::result::Result<T, E>;
