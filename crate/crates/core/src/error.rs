//! Error types for the protocol layer.

use thiserror::Error;

/// Errors raised by sigma-protocol operations and their instantiations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SigmaError {
    /// Rejection-sampling rejection; the caller retries with a fresh commitment.
    #[error("prover aborted (rejection sampling)")]
    Abort,
    /// A retry loop around aborting provers ran out of budget.
    #[error("abort retry budget of {budget} attempts exhausted")]
    AbortRetryExceeded { budget: usize },
    #[error("the two challenges are equal")]
    SameChallenge,
    #[error("transcript does not verify")]
    NotVerifying,
    #[error("randomness length {got} bits, scheme expects {expected}")]
    BadRandomnessLength { expected: usize, got: usize },
    /// The value is not in the image of the commitment map.
    #[error("commitment is not in the image of the commitment map")]
    NotInRange,
    #[error("value shares a factor with the modulus")]
    NotCoprime,
    #[error("challenge seed shorter than the encoder's consumption bound")]
    SeedExhausted,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    /// Gaussian parameter below the trapdoor's sampling threshold.
    #[error("gaussian parameter {got} below quality threshold {required}")]
    QualityViolation { required: f64, got: f64 },
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    /// The instantiation cannot respond to this commitment.
    #[error("no response available for this commitment")]
    ResponseUnavailable,
    #[error("no exponent coprime to the totient found within the retry budget")]
    ExponentDividesTotient,
    #[error("argument outside the formula's domain: {0}")]
    DomainError(&'static str),
    #[error("adversary exceeded its declared query budget")]
    AdversaryBudgetExceeded,
}
