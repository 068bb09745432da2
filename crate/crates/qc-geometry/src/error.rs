use thiserror::Error;

/// Errors produced by constructors and operations of this crate.
#[derive(Debug, Error)]
pub enum QcError {
    /// The quaternionic rank must satisfy `n >= 2`.
    #[error("quaternionic rank must be at least 2, got n = {0}")]
    RankTooSmall(usize),

    /// A matrix or vector has the wrong shape for the structure at hand.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A named model or structure invariant failed validation.
    #[error("invariant `{name}` violated: residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    InvariantViolated {
        name: String,
        residual: f64,
        tol: f64,
    },

    /// Full-matrix curvature requested but no matrix `B` is available.
    #[error("curvature matrix unavailable: the model supplies only curvature traces")]
    CurvatureUnavailable,

    /// Integrator step sizes must be strictly positive.
    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),

    /// An operation requires a length-parametrized extremal (`|u| = 1`).
    #[error("horizontal momentum must be a unit vector, got |u| = {0}")]
    NotUnitSpeed(f64),

    /// `u = 0` extremals cannot be length-parametrized.
    #[error("zero horizontal momentum: extremal cannot be length-parametrized")]
    ZeroMomentum,

    /// Malformed input data (files, parameters).
    #[error("{0}")]
    BadInput(String),
}
