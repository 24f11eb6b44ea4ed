//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input values outside the accepted domain (non-finite entries etc.).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Mismatched or unsupported shapes.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Index outside the valid range.
    #[error("index out of range: {0}")]
    Index(String),

    /// Invalid configuration or hyperparameter.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Input too small or degenerate for the operation.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Malformed file contents.
    #[error("format error: {0}")]
    Format(String),

    /// Missing or invalid sidecar fields.
    #[error("schema error: {0}")]
    Schema(String),

    /// Cell-level parse failure; rows and columns are 1-based.
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    /// Metric not defined for the given labeling.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// No full chunk could be formed from the input.
    #[error("empty stream: {0}")]
    EmptyStream(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
