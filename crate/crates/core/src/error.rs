//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by grid, pruning, ingestion, scoring, and synthesis
/// operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Two inputs that must agree in shape or dimension do not.
    #[error("dimension mismatch: {context} (left {left}, right {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    /// An argument violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration value violates its invariant.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A trajectory or step could not be ingested.
    #[error("ingestion error: {0}")]
    Ingestion(String),

    /// A service reply did not match the expected schema. Carries the raw
    /// payload for audit.
    #[error("schema error: {message}; raw payload: {raw}")]
    Schema { message: String, raw: String },

    /// A service reply parsed but failed a semantic check. Carries the raw
    /// payload for audit.
    #[error("validation error: {message}; raw payload: {raw}")]
    Validation { message: String, raw: String },

    /// An operation was attempted in the wrong state.
    #[error("state error: {0}")]
    State(String),

    /// The external translation service could not be reached.
    #[error("transport error: {0}")]
    Transport(String),

    /// A file does not hold the expected format.
    #[error("format error: {0}")]
    Format(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn invalid_config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
