//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate or argument fell outside its required domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Construction parameters violate a documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two inputs that must share a dimension/grid/total do not.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// A numeric routine failed to converge or produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Instance exceeds the integer-arithmetic headroom guard.
    #[error("overflow guard: {0}")]
    Overflow(String),

    /// Oracle instance exceeds its documented size limit.
    #[error("size limit: {0}")]
    SizeLimit(String),

    /// A solver contract was violated; indicates a bug in instance construction.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
