use thiserror::Error;

/// Errors raised by the ordinal, quantifier and statistics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("series of length {len} is too short: at least {required} observations are needed")]
    SeriesTooShort { len: usize, required: usize },

    #[error("timestamps are not evenly spaced (first irregular gap at index {index})")]
    IrregularTimestamps { index: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("duplicate asset label `{0}`")]
    DuplicateLabel(String),

    #[error("baseline asset `{0}` not present")]
    MissingBaseline(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("circulant embedding failed: {0}")]
    EmbeddingFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
