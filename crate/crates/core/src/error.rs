use thiserror::Error;

use crate::special::BesselBranch;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Parameters outside the domain of the requested operation; the message
    /// names the violated condition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Bessel K evaluation failed on the {branch} branch (order {order}, x = {x}, value = {value})")]
    Bessel { branch: BesselBranch, order: f64, x: f64, value: f64 },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// Tail bound cannot reach the requested tolerance with the declared growth.
    #[error("tail bound unattainable: {0}")]
    TailBound(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("duplicate interpolation points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),

    #[error("Gram matrix factorization failed after the full jitter ladder (last jitter {0:e})")]
    JitterExhausted(f64),
}

impl Error {
    /// True for failures that are numerical rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Bessel { .. } | Error::Quadrature(_) | Error::TailBound(_) | Error::JitterExhausted(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
