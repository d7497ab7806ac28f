use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid autocorrelation estimate: {0}")]
    InvalidAcf(String),

    /// The Quenouille sum came out non-positive; the sample ACFs are unusable.
    #[error("non-positive ESS denominator ({0:e})")]
    NonPositiveDenominator(f64),

    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

impl Error {
    /// True for errors caused by the estimation itself rather than by bad input.
    pub fn is_estimation_failure(&self) -> bool {
        matches!(self, Error::InvalidAcf(_) | Error::NonPositiveDenominator(_) | Error::Resource(_))
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
