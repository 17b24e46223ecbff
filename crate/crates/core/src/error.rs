use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("map is not an immersion: E[rho_{index}] = 0 (factor {index} is constant)")]
    Degenerate { index: usize },

    #[error("matrix dimension {dim} exceeds the face-enumeration cap of {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported factor: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("no solution found: {0}")]
    NoSolution(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
