//! Reduction of Lotka-Volterra systems with exponentially distributed delays
//! to plain ODE systems of twice the dimension.
//!
//! Each species `j` gets an auxiliary variable
//! `x_{n+j}(t) = alpha * integral e^{-alpha (t-s)} x_j(s) ds` (over s <= t),
//! the exponentially weighted running average of its past. Differentiating
//! that definition closes the system: the auxiliaries obey
//! `x_{n+j}' = alpha (x_j - x_{n+j})` and no delayed lookups remain.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::history::HistoryFunction;
use crate::linalg::solve_dense;
use crate::scalar::{cst, Real};
use crate::system::{DelaySystem, KernelTerm};

/// Lotka-Volterra interactions with a shared exponential memory kernel:
///
/// `x_i' = x_i (b_i + sum_j a_ij x_j + sum_j beta_ij y_j)` where `y_j` is the
/// `alpha e^{-alpha t}`-weighted average of the past of `x_j`. The kernel
/// integrates to one, so `beta` weights are comparable to `a` entries.
#[derive(Debug, Clone)]
pub struct LotkaVolterraDistributed<T> {
    n: usize,
    b: Vec<T>,
    a: Vec<Vec<T>>,
    beta: Vec<Vec<T>>,
    alpha: T,
}

impl<T: Real> LotkaVolterraDistributed<T> {
    pub fn new(b: Vec<T>, a: Vec<Vec<T>>, beta: Vec<Vec<T>>, alpha: T) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::invalid("model needs at least one species"));
        }
        if !(alpha.is_finite() && alpha > T::zero()) {
            return Err(Error::invalid(format!(
                "kernel rate alpha must be positive and finite, got {alpha}"
            )));
        }
        for (name, m) in [("interaction matrix", &a), ("kernel weight matrix", &beta)] {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::invalid(format!("{name} must be {n}x{n}")));
            }
            if m.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("{name} has a non-finite entry")));
            }
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("growth-rate vector has a non-finite entry"));
        }
        Ok(Self { n, b, a, beta, alpha })
    }

    pub fn species(&self) -> usize {
        self.n
    }

    pub fn growth_rates(&self) -> &[T] {
        &self.b
    }

    pub fn interactions(&self) -> &[Vec<T>] {
        &self.a
    }

    pub fn kernel_weights(&self) -> &[Vec<T>] {
        &self.beta
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
}

/// Rewrites the distributed-delay model as a `2n`-dimensional ODE (a
/// `DelaySystem` with an empty delay list). Components `0..n` are the
/// species, `n..2n` the running averages; the returned system carries one
/// [`KernelTerm`] per nonzero `beta` entry recording where each average
/// feeds back.
///
/// Initial data for the auxiliaries is not free: it must equal the kernel
/// average of the species history at time zero. Use
/// [`auxiliary_initial_values`] or [`reduced_initial_state`].
pub fn reduce_exponential_kernel<T: Real>(m: &LotkaVolterraDistributed<T>) -> DelaySystem<T> {
    let n = m.n;
    let alpha = m.alpha;
    let b = m.b.clone();
    let a = m.a.clone();
    let beta = m.beta.clone();
    let rhs = Arc::new(move |_t: T, x: &[T], _delayed: &[Vec<T>], dx: &mut [T]| {
        for i in 0..n {
            let mut acc = b[i];
            for j in 0..n {
                acc += a[i][j] * x[j] + beta[i][j] * x[n + j];
            }
            dx[i] = x[i] * acc;
        }
        for j in 0..n {
            dx[n + j] = alpha * (x[j] - x[n + j]);
        }
    });
    let terms: Vec<KernelTerm<T>> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| m.beta[i][j] != T::zero())
        .map(|(i, j)| KernelTerm {
            alpha,
            row: i,
            col: j,
            weight: m.beta[i][j],
        })
        .collect();
    DelaySystem::new(2 * n, Vec::new(), rhs)
        .expect("dimension 2n >= 2 and an empty delay ladder are always valid")
        .with_kernel_terms(terms)
}

/// Solves `(A + B) x* = -b` for the coexistence steady state and requires
/// every component positive. The kernel average of a constant equals that
/// constant, so the distributed terms contribute `beta x*` at equilibrium.
pub fn lv_steady_state<T: Real>(m: &LotkaVolterraDistributed<T>) -> Result<Vec<T>> {
    let n = m.n;
    let mut coeff = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            coeff[i][j] = m.a[i][j] + m.beta[i][j];
        }
    }
    let rhs: Vec<T> = m.b.iter().map(|&v| -v).collect();
    let x = solve_dense(coeff, rhs, "steady-state matrix A + B")?;
    for (i, &v) in x.iter().enumerate() {
        if !(v > T::zero()) {
            return Err(Error::NonpositiveSteadyState {
                component: i,
                value: v.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(x)
}

/// The steady state of the reduced `2n` ODE: species values followed by the
/// same values again (a constant past averages to itself).
pub fn duplicated_steady_state<T: Real>(m: &LotkaVolterraDistributed<T>) -> Result<Vec<T>> {
    let x = lv_steady_state(m)?;
    let mut full = x.clone();
    full.extend_from_slice(&x);
    Ok(full)
}

/// `alpha * integral_a^b e^{alpha s} s^k ds` in closed form:
/// `F_k(b) - F_k(a)` with
/// `F_k(s) = e^{alpha s} * sum_{m=0}^{k} (-1)^m k!/(k-m)! s^{k-m} alpha^{-m}`.
fn weighted_power_integral<T: Real>(alpha: T, k: usize, a: T, b: T) -> T {
    let f = |s: T| -> T {
        let mut sum = T::zero();
        let mut falling = T::one(); // k! / (k-m)!
        let mut sign = T::one();
        let mut alpha_pow = T::one();
        for mm in 0..=k {
            let power = (k - mm) as i32;
            sum += sign * falling * s.powi(power) / alpha_pow;
            falling *= cst::<T>((k - mm) as f64);
            sign = -sign;
            alpha_pow *= alpha;
        }
        (alpha * s).exp() * sum
    };
    f(b) - f(a)
}

/// Auxiliary initial values `x_{n+j}(0) = alpha * integral_{-inf}^0 e^{alpha s}
/// x_j(s) ds`, integrating the history's polynomial pieces exactly and
/// continuing it as a constant (its earliest value) before `span_start`, so
/// the improper integral converges in closed form.
pub fn auxiliary_initial_values<T: Real>(
    m: &LotkaVolterraDistributed<T>,
    history: &HistoryFunction<T>,
) -> Result<Vec<T>> {
    if history.dimension() != m.n {
        return Err(Error::invalid(format!(
            "history dimension {} does not match the {} species",
            history.dimension(),
            m.n
        )));
    }
    let alpha = m.alpha;
    let s0 = history.span_start();
    let earliest = history.eval(s0)?;
    let mut aux = vec![T::zero(); m.n];
    for j in 0..m.n {
        // Frozen tail on (-inf, s0]: the constant x_j(s0) integrates to
        // x_j(s0) e^{alpha s0}.
        let mut acc = earliest[j] * (alpha * s0).exp();
        for piece in history.pieces() {
            for (k, &c) in piece.coeffs[j].iter().enumerate() {
                if c != T::zero() {
                    acc += c * weighted_power_integral(alpha, k, piece.start, piece.end);
                }
            }
        }
        aux[j] = acc;
    }
    Ok(aux)
}

/// Initial state of the reduced `2n` ODE: the history's value at time zero
/// followed by the auxiliary initial values.
pub fn reduced_initial_state<T: Real>(
    m: &LotkaVolterraDistributed<T>,
    history: &HistoryFunction<T>,
) -> Result<Vec<T>> {
    let mut state = history.value_at_zero();
    state.extend(auxiliary_initial_values(m, history)?);
    Ok(state)
}
