//! Error type shared by every module.

use std::path::PathBuf;

/// Errors raised by the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input value failed validation; `field` names the offending field.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An iterative kernel gave up; `residual` is the best residual reached.
    #[error("numeric failure: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },

    #[error("parameter {name}: {reason}")]
    Parameter { name: String, reason: String },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("vector is not unit length (norm {0})")]
    Normalization(f64),

    #[error("matrix is numerically singular: {0}")]
    Singular(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Configuration problem; `path` is a JSON-pointer-style location such
    /// as `parameters.epsilon`.
    #[error("config error at {path}: {reason}")]
    Config { path: String, reason: String },

    #[error("unknown key {0}")]
    Key(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parameter(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
