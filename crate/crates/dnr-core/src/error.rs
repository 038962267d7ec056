use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("training diverged: {0}")]
    Diverged(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
