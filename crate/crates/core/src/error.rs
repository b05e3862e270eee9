use thiserror::Error;

use crate::trees::Split;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("incompatible splits {0} and {1}")]
    IncompatibleSplits(Split, Split),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("degenerate stratum: split {0} has weight zero, contract it first")]
    DegenerateStratum(Split),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
