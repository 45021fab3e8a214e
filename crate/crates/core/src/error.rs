use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tolerance not reached: {0}")]
    ToleranceNotReached(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("branch mismatch: {0}")]
    BranchMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
