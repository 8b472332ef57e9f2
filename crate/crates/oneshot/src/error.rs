use thiserror::Error;

/// Errors of the harness layer.
#[derive(Debug, Error)]
pub enum OneshotError {
    #[error(transparent)]
    Core(#[from] oneshot_core::Error),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, OneshotError>;

impl OneshotError {
    pub fn domain(msg: impl Into<String>) -> Self {
        OneshotError::Core(oneshot_core::Error::Domain(msg.into()))
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        OneshotError::Usage(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        OneshotError::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for usage errors, 3 for numerical failures and
    /// 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            OneshotError::Usage(_) | OneshotError::Io { .. } | OneshotError::Json(_) => 2,
            OneshotError::Core(e) if e.is_numerical() => 3,
            _ => 1,
        }
    }
}
