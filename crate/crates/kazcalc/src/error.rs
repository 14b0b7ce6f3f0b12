//! Crate-wide error type.
//!
//! Usage errors (zero degrees, wrong parity, out-of-range strata) are
//! distinguished from internal consistency failures (cancellation
//! mismatches), which indicate a modeling bug rather than bad input.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("truncation mismatch between series: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("{what} must be positive")]
    MustBePositive { what: &'static str },

    #[error("{what} must be at least {min}")]
    TooSmall { what: &'static str, min: usize },

    #[error("codimension must be odd here, got {0}")]
    EvenCodimension(usize),

    #[error("invalid stratum: {0}")]
    InvalidStratum(String),

    #[error("this operation expects a {0} family")]
    WrongFamily(&'static str),

    #[error("no closed-form series for custom families")]
    ClosedFormUnavailable,

    #[error("expected an E_1 page")]
    NotAnE1Page,

    #[error("page column {0} does not match the family's E_1 column")]
    PageFamilyMismatch(usize),

    #[error("rank-level cancellation mismatch at column {column}")]
    CancellationMismatch { column: usize },

    #[error("custom family is not block-degenerate: {0}")]
    NondegenerateFamily(String),

    #[error("truncation {actual} too small; need at least {needed}")]
    TruncationTooSmall { needed: usize, actual: usize },

    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
