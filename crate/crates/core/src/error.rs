//! Error type shared across the crate.
//!
//! Payload values are reported as `f64` regardless of the working scalar so
//! the error enum stays object-safe and printable without generics.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong constructing or running an analysis.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An evaluation time fell outside the domain of a history or trajectory.
    #[error("t = {t} outside the {what} domain [{lo}, {hi}]")]
    OutOfDomain {
        what: &'static str,
        t: f64,
        lo: f64,
        hi: f64,
    },

    /// The integrator produced a non-finite state or derivative.
    #[error("solution became non-finite at t = {t}")]
    NonFinite { t: f64 },

    /// The requested step does not satisfy h <= min delay.
    #[error("step {step} exceeds the smallest delay {tau_min}")]
    StepExceedsDelay { step: f64, tau_min: f64 },

    /// A linear solve hit a (numerically) singular matrix.
    #[error("{0} is singular")]
    Singular(&'static str),

    /// A point claimed to be a steady state fails the residual check.
    #[error("not a steady state: rhs residual {residual:.3e} exceeds {tol:.3e}")]
    NotSteadyState { residual: f64, tol: f64 },

    /// The operation is only implemented for small state dimensions.
    #[error("dimension {dim} unsupported for {what}")]
    UnsupportedDimension { dim: usize, what: &'static str },

    /// A steady state required to be componentwise positive is not.
    #[error("steady state component {component} is not positive ({value})")]
    NonpositiveSteadyState { component: usize, value: f64 },

    /// A trajectory value required to be positive is not.
    #[error("state component {component} is not positive at t = {t}")]
    NonpositiveState { component: usize, t: f64 },

    /// An iteration failed to converge within its budget.
    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    /// The characteristic function nearly vanishes on a counting contour.
    #[error("characteristic function vanishes on or near the window boundary ({where_})")]
    BoundaryRoot { where_: &'static str },

    /// Pure imaginary crossing requested where none exists.
    #[error("no pure imaginary characteristic root: requires b > a >= 0 (a = {a}, b = {b})")]
    NoPureImaginaryRoot { a: f64, b: f64 },

    /// Root location found nothing inside the requested window.
    #[error("no characteristic roots inside the window; widen it")]
    NoRootsInWindow,

    /// Unknown model name passed to the zoo.
    #[error("unknown model '{0}'")]
    UnknownModel(String),

    /// A model was constructed without a required parameter.
    #[error("model '{model}' missing parameter '{name}'")]
    MissingParameter {
        model: &'static str,
        name: &'static str,
    },
}

impl Error {
    /// Convenience constructor for [`Error::InvalidInput`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
