use thiserror::Error;

/// Errors raised by the network, learning and pattern operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("weight matrix violates its invariants: {0}")]
    InvalidWeights(String),

    #[error("state contains a non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("pattern entry {value} at index {index} is not -1 or +1")]
    NotBipolar { index: usize, value: i64 },

    #[error("pattern list is empty")]
    EmptyPatterns,

    #[error("integration diverged at step {step}")]
    Diverged { step: usize },

    #[error("cannot flip {requested} entries of a {len}-entry pattern")]
    FlipCountTooLarge { requested: usize, len: usize },

    #[error("pattern family does not fit: {0}")]
    FamilyDoesNotFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
