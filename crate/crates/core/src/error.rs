//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("angle out of range: {0}")]
    AngleOutOfRange(String),

    #[error("group mismatch: expected {expected}, got {got}")]
    GroupMismatch { expected: String, got: String },

    #[error("band limit exceeded: grid is exact up to <xi> = {band_limit}, requested {requested}")]
    BandLimitExceeded { band_limit: f64, requested: f64 },

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not a multiplier: x-dependence {max_deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotAMultiplier { max_deviation: f64, tolerance: f64 },

    #[error("insufficient bad frequencies within cutoff: found {achieved} of {requested}")]
    InsufficientBadFrequencies { achieved: usize, requested: usize },

    #[error("grid does not factorize over the subgroup circle")]
    NonFactorizingGrid,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),

    #[error("empty profile")]
    EmptyProfile,

    #[error("dual index {0} outside declared symbol support")]
    OutsideSupport(String),

    #[error("csv error at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
