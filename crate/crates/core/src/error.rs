use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file; `row` is 1-based over data rows (header excluded).
    #[error("ingest error at row {row}, column `{column}`: {message}")]
    Ingest {
        row: usize,
        column: String,
        message: String,
    },
    #[error("cannot read input: {0}")]
    Unreadable(String),
    #[error("invalid dataset: {0}")]
    Validation(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// Short machine-readable kind used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Ingest { .. } | Error::Unreadable(_) => "ingest",
            Error::Validation(_) => "validation",
            Error::Argument(_) => "argument",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Ingest { .. } | Error::Unreadable(_) | Error::Validation(_) | Error::Json(_) => 2,
            Error::Argument(_) => 64,
            Error::Internal(_) => 70,
            Error::Io(_) => 74,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
