use alloc::string::String;

/// Errors produced by the estimation, sampling and rate-fitting routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point lies outside the unit cube")]
    OutsideDomain,

    #[error("linear solve failed: {0}")]
    Numeric(&'static str),

    #[error("effective sample size is zero for n = {n}; use a larger sample")]
    SampleTooSmall { n: usize },

    #[error("rate fit needs at least 3 positive points, got {0}")]
    TooFewPoints(usize),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
