use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("malformed document: {0}")]
    Parse(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("parameter domain violation: {0}")]
    Domain(String),

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
