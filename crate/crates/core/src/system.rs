//! Delay system description consumed by the integrator and the linearizer.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Right-hand side callback.
///
/// Arguments: current time `t`, current state `x`, one delayed state vector
/// per entry of [`DelaySystem::delays`] (same order), output buffer `dx`.
pub type Rhs<T> = Arc<dyn Fn(T, &[T], &[Vec<T>], &mut [T]) + Send + Sync>;

/// Marker for a distributed-delay term eliminated by chain-trick reduction.
///
/// Records that reduced component `row` integrates component `col` against the
/// kernel `alpha * exp(-alpha * s)` with the given weight; kept on the reduced
/// system so provenance survives the reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTerm<T> {
    pub alpha: T,
    pub row: usize,
    pub col: usize,
    pub weight: T,
}

/// A retarded functional differential equation with finitely many discrete
/// delays: `x'(t) = f(t, x(t), x(t - tau_1), ..., x(t - tau_m))`.
///
/// Invariants: `delays` is strictly increasing and positive; `dimension >= 1`.
/// `kernel_terms` is metadata only (attached by the chain-trick reduction);
/// the rhs of a system carrying them is already a complete ODE.
#[derive(Clone)]
pub struct DelaySystem<T> {
    dimension: usize,
    delays: Vec<T>,
    rhs: Rhs<T>,
    kernel_terms: Vec<KernelTerm<T>>,
    linearizable: bool,
}

impl<T: Real> DelaySystem<T> {
    /// Builds a system, validating dimension and the delay ladder.
    pub fn new(dimension: usize, delays: Vec<T>, rhs: Rhs<T>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("system dimension must be at least 1"));
        }
        for (i, &tau) in delays.iter().enumerate() {
            if !tau.is_finite() || tau <= T::zero() {
                return Err(Error::invalid(format!(
                    "delay {i} must be positive and finite"
                )));
            }
            if i > 0 && !(delays[i - 1] < tau) {
                return Err(Error::invalid(
                    "delays must be strictly increasing (deduplicate equal delays)",
                ));
            }
        }
        Ok(DelaySystem {
            dimension,
            delays,
            rhs,
            kernel_terms: Vec::new(),
            linearizable: true,
        })
    }

    /// Attaches kernel-term provenance (used by the chain-trick reduction).
    pub fn with_kernel_terms(mut self, terms: Vec<KernelTerm<T>>) -> Self {
        self.kernel_terms = terms;
        self
    }

    /// Declares whether finite-difference linearization is meaningful.
    pub fn with_linearizable(mut self, linearizable: bool) -> Self {
        self.linearizable = linearizable;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Discrete delays, strictly increasing.
    pub fn delays(&self) -> &[T] {
        &self.delays
    }

    pub fn tau_min(&self) -> Option<T> {
        self.delays.first().copied()
    }

    pub fn tau_max(&self) -> Option<T> {
        self.delays.last().copied()
    }

    pub fn kernel_terms(&self) -> &[KernelTerm<T>] {
        &self.kernel_terms
    }

    pub fn linearizable(&self) -> bool {
        self.linearizable
    }

    /// Evaluates the right-hand side into `dx`.
    #[inline]
    pub fn eval_rhs(&self, t: T, x: &[T], delayed: &[Vec<T>], dx: &mut [T]) {
        debug_assert_eq!(x.len(), self.dimension);
        debug_assert_eq!(delayed.len(), self.delays.len());
        debug_assert_eq!(dx.len(), self.dimension);
        (self.rhs)(t, x, delayed, dx);
    }
}

impl<T: Real> std::fmt::Debug for DelaySystem<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DelaySystem")
            .field("dimension", &self.dimension)
            .field("delays", &self.delays)
            .field("kernel_terms", &self.kernel_terms)
            .field("linearizable", &self.linearizable)
            .finish_non_exhaustive()
    }
}
