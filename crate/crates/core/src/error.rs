//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by samplers, special functions and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Argument too large for the gamma function in this float type.
    #[error("gamma overflow at x = {x}")]
    Overflow { x: f64 },

    /// Series truncation limit reached before the stopping rule fired.
    #[error("series did not converge within {max_terms} terms")]
    NoConvergence { max_terms: usize },

    /// A sampling search exceeded its iteration cap. With a healthy uniform
    /// source this has vanishing probability; it signals a broken source.
    #[error("sampler search exceeded {cap} iterations")]
    SamplerCap { cap: u64 },

    /// Rejection sampling exceeded its iteration cap.
    #[error("rejection sampling exceeded {cap} iterations")]
    RejectionCap { cap: u64 },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature stalled: estimated error {estimate:e} above tolerance {tolerance:e}")]
    QuadratureFailure { tolerance: f64, estimate: f64 },

    /// An integrand evaluated to a non-finite value (singularity sampled).
    #[error("integrand returned a non-finite value at argument {at}")]
    NonFinite { at: f64 },

    /// Name not present in the function registry.
    #[error("unknown function '{name}'; registered: {registered}")]
    UnknownFunction { name: String, registered: String },

    /// Trial count too small for a confidence interval.
    #[error("need at least 2 trials for a confidence interval, got {got}")]
    TooFewTrials { got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
