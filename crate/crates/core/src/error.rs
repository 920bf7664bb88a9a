use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by ingestion, estimation and reporting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("degenerate local frame at point {point}: all neighbor covariance eigenvalues vanish")]
    DegenerateFrame { point: usize },

    #[error("undefined correlation for `{measure}`: {reason}")]
    UndefinedCorrelation { measure: String, reason: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
            Error::Validation(_) => "validation",
            Error::Parameter(_) => "parameter",
            Error::DegenerateFrame { .. } => "degenerate_frame",
            Error::UndefinedCorrelation { .. } => "undefined_correlation",
            Error::Internal(_) => "internal",
        }
    }

    /// Process exit status: 1 input/validation, 2 parameters, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Format { .. } | Error::Validation(_) => 1,
            Error::DegenerateFrame { .. } => 1,
            Error::Parameter(_) | Error::UndefinedCorrelation { .. } => 2,
            Error::Internal(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
