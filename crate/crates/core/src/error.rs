use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No worst-case sample construction is known for the requested regime.
    #[error("unsupported construction: {0}")]
    UnsupportedConstruction(String),

    /// Brute-force enumeration was asked to run above its desk-scale guard.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
