//! Named model constructors: population and feedback models with their
//! analytic steady states, canonical histories, and coordinate changes.
//!
//! Every entry is reachable through [`make_model`] under the exact names the
//! command-line front end exposes: `hutchinson`, `prey_predator`, `allee`,
//! `cooperative`, `competition`, `linear_scalar`, `damped_secondorder`,
//! `neutral_example`, `cheyne_stokes_linear`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::history::HistoryFunction;
use crate::linalg::solve_dense;
use crate::scalar::{cst, Real};
use crate::spectral::QuasiPolynomial;
use crate::system::{DelaySystem, Rhs};
use crate::trajectory::{CubicSegment, Trajectory};

/// A named model instance: its delay system, analytic steady states, and a
/// canonical history, bundled for the front end and the test batteries.
///
/// Invariants: every listed steady state zeroes the rhs within 1e-10 when
/// substituted as a constant state; `default_history` spans the largest delay.
#[derive(Clone)]
pub struct ModelSpec<T: Real> {
    /// Canonical model name (the `--model` contract).
    pub name: &'static str,
    /// Fully resolved parameters, defaults included.
    pub parameters: BTreeMap<String, T>,
    /// Simulable right-hand side; `None` for the spectral-only entry (a
    /// neutral equation cannot be integrated by a retarded stepper).
    pub system: Option<DelaySystem<T>>,
    /// `(state, note)` pairs naming each equilibrium.
    pub steady_states: Vec<(Vec<T>, String)>,
    /// Canonical history: constant at half the positive equilibrium where one
    /// exists, constant 1 for the linear entries.
    pub default_history: HistoryFunction<T>,
    /// Characteristic function for the linear entries; `None` when the model
    /// is nonlinear (linearize at a steady state instead).
    pub char_fun: Option<QuasiPolynomial<T>>,
}

impl<T: Real> std::fmt::Debug for ModelSpec<T> {
    // The system's rhs is a closure; report the printable parts.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelSpec")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .field("steady_states", &self.steady_states)
            .field("char_fun", &self.char_fun)
            .finish_non_exhaustive()
    }
}

/// Builds the named model from a parameter map.
///
/// Unknown names and unknown or missing parameter keys are rejected, as are
/// values violating the model's sign constraints. Delay parameters may be
/// omitted and default to zero; a zero delay folds the lagged read into the
/// current state.
pub fn make_model<T: Real>(name: &str, params: &BTreeMap<String, T>) -> Result<ModelSpec<T>> {
    match name {
        "hutchinson" => hutchinson(params),
        "prey_predator" => prey_predator(params),
        "allee" => allee(params),
        "cooperative" => cooperative(params),
        "competition" => competition(params),
        "linear_scalar" => scalar_linear_entry("linear_scalar", params, "origin"),
        "damped_secondorder" => damped_secondorder(params),
        "neutral_example" => neutral_example(params),
        "cheyne_stokes_linear" => {
            scalar_linear_entry("cheyne_stokes_linear", params, "equilibrium ventilation deviation")
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Parameter plumbing
// ---------------------------------------------------------------------------

fn reject_unknown<T: Real>(
    model: &'static str,
    params: &BTreeMap<String, T>,
    allowed: &[&str],
) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::invalid(format!(
                "model '{model}' does not take parameter '{key}'"
            )));
        }
    }
    Ok(())
}

fn require<T: Real>(
    model: &'static str,
    params: &BTreeMap<String, T>,
    name: &'static str,
) -> Result<T> {
    params
        .get(name)
        .copied()
        .ok_or(Error::MissingParameter { model, name })
}

fn positive<T: Real>(model: &str, name: &str, value: T) -> Result<T> {
    if value.is_finite() && value > T::zero() {
        Ok(value)
    } else {
        Err(Error::invalid(format!(
            "model '{model}': parameter '{name}' must be positive and finite (got {value})"
        )))
    }
}

fn finite<T: Real>(model: &str, name: &str, value: T) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(format!(
            "model '{model}': parameter '{name}' must be finite"
        )))
    }
}

/// A delay parameter: nonnegative, finite, defaulting to zero when absent.
fn delay_param<T: Real>(
    model: &'static str,
    params: &BTreeMap<String, T>,
    name: &'static str,
) -> Result<T> {
    let value = params.get(name).copied().unwrap_or_else(T::zero);
    if value.is_finite() && value >= T::zero() {
        Ok(value)
    } else {
        Err(Error::invalid(format!(
            "model '{model}': delay '{name}' must be nonnegative and finite (got {value})"
        )))
    }
}

fn resolved<T: Real>(pairs: &[(&str, T)]) -> BTreeMap<String, T> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Sorts the positive entries of `taus` into a strictly increasing ladder and
/// maps each original entry to its slot; `None` marks a zero delay, to be
/// read from the current state.
fn delay_slots<T: Real>(taus: &[T]) -> (Vec<T>, Vec<Option<usize>>) {
    let mut ladder: Vec<T> = taus.iter().copied().filter(|t| *t > T::zero()).collect();
    ladder.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Exact dedup: repeated parameters arrive bit-identical.
    ladder.dedup();
    let slots = taus
        .iter()
        .map(|t| {
            if *t > T::zero() {
                Some(ladder.iter().position(|l| l == t).unwrap())
            } else {
                None
            }
        })
        .collect();
    (ladder, slots)
}

fn span_start<T: Real>(ladder: &[T]) -> T {
    ladder.last().map_or(T::zero(), |tau| -*tau)
}

fn halved<T: Real>(state: &[T]) -> Vec<T> {
    state.iter().map(|v| *v * cst(0.5)).collect()
}

// ---------------------------------------------------------------------------
// Logistic growth with delayed density dependence
// ---------------------------------------------------------------------------

fn hutchinson<T: Real>(params: &BTreeMap<String, T>) -> Result<ModelSpec<T>> {
    const MODEL: &str = "hutchinson";
    reject_unknown(MODEL, params, &["gamma", "k", "tau"])?;
    let gamma = positive(MODEL, "gamma", require(MODEL, params, "gamma")?)?;
    let k = positive(MODEL, "k", require(MODEL, params, "k")?)?;
    let tau = delay_param(MODEL, params, "tau")?;

    let (ladder, slots) = delay_slots(&[tau]);
    let s = slots[0];
    let rhs: Rhs<T> = Arc::new(move |_t, x, delayed, dx| {
        let lag = match s {
            Some(i) => delayed[i][0],
            None => x[0],
        };
        dx[0] = gamma * x[0] * (T::one() - lag / k);
    });
    let system = DelaySystem::new(1, ladder.clone(), rhs)?;
    let default_history = HistoryFunction::constant(span_start(&ladder), &[k * cst(0.5)])?;
    Ok(ModelSpec {
        name: MODEL,
        parameters: resolved(&[("gamma", gamma), ("k", k), ("tau", tau)]),
        system: Some(system),
        steady_states: vec![
            (vec![T::zero()], "extinction".into()),
            (vec![k], "carrying capacity".into()),
        ],
        default_history,
        char_fun: None,
    })
}

/// The unit-delay form of the delayed logistic equation,
/// `y'(t) = -alpha * y(t - 1) * [1 + y(t)]` with `alpha = gamma * tau`,
/// reached by `y = x/k - 1` and `tbar = t/tau`.
///
/// The carrying capacity drops out of the scaled dynamics, so the coordinate
/// maps take `k` as an argument; both maps round-trip to identity.
#[derive(Clone)]
pub struct ScaledHutchinson<T: Real> {
    /// The product `gamma * tau`, the only surviving parameter.
    pub alpha: T,
    tau: T,
    system: DelaySystem<T>,
}

impl<T: Real> ScaledHutchinson<T> {
    /// The scaled system (dimension 1, single delay of exactly 1).
    pub fn system(&self) -> &DelaySystem<T> {
        &self.system
    }

    /// The original delay, kept for the time maps.
    pub fn tau(&self) -> T {
        self.tau
    }

    /// State map `x -> y = x/k - 1`; the steady state `k` maps to 0.
    pub fn state_to_scaled(&self, k: T, x: T) -> T {
        x / k - T::one()
    }

    /// Inverse state map `y -> x = k (1 + y)`.
    pub fn state_from_scaled(&self, k: T, y: T) -> T {
        k * (T::one() + y)
    }

    /// Time map `t -> tbar = t / tau`.
    pub fn time_to_scaled(&self, t: T) -> T {
        t / self.tau
    }

    /// Inverse time map `tbar -> t = tau * tbar`.
    pub fn time_from_scaled(&self, tbar: T) -> T {
        tbar * self.tau
    }
}

/// Rescales the delayed logistic equation to unit delay.
///
/// Requires `gamma, tau > 0`. The returned system together with the maps on
/// [`ScaledHutchinson`] reproduces the original dynamics: simulate in `y` and
/// map back with `x = k (1 + y)`, `t = tau * tbar`.
pub fn nondimensionalize_hutchinson<T: Real>(gamma: T, tau: T) -> Result<ScaledHutchinson<T>> {
    let gamma = positive("hutchinson (scaled)", "gamma", gamma)?;
    let tau = positive("hutchinson (scaled)", "tau", tau)?;
    let alpha = gamma * tau;
    let rhs: Rhs<T> = Arc::new(move |_t, x, delayed, dx| {
        dx[0] = -alpha * delayed[0][0] * (T::one() + x[0]);
    });
    let system = DelaySystem::new(1, vec![T::one()], rhs)?;
    Ok(ScaledHutchinson { alpha, tau, system })
}

// ---------------------------------------------------------------------------
// Prey-predator with mutually interfering predators
// ---------------------------------------------------------------------------

/// Solves the steady-state pair `gamma (1 - x/k) = a y^m`,
/// `b x y^(m-1) = c` for the interior equilibrium `(x*, y*)`.
///
/// Damped fixed point: `x` is eliminated through `x = (c/b) y^(1-m)` (which
/// zeroes the second equation identically) and `y` is averaged 50/50 with
/// `[(gamma/a)(1 - x/k)]^(1/m)`. The composed map is decreasing in `y`, so
/// the damping suppresses the period-2 bounce; iteration stops when the first
/// equation's residual drops below `1e-12 * max(1, gamma)`.
pub fn prey_predator_steady_state<T: Real>(
    gamma: T,
    k: T,
    a: T,
    b: T,
    c: T,
    m: T,
) -> Result<(T, T)> {
    let one = T::one();
    let half = cst::<T>(0.5);
    let tol = cst::<T>(1e-12) * one.max(gamma.abs());
    // Any fixed point has x < k, i.e. y below this cap; start halfway up.
    let y_cap = (b * k / c).powf(one / (one - m));
    let mut y = y_cap * half;
    for _ in 0..10_000 {
        let x = (c / b) * y.powf(one - m);
        let residual = gamma * (one - x / k) - a * y.powf(m);
        if residual.abs() <= tol {
            return Ok((x, y));
        }
        let level = (gamma / a) * (one - x / k);
        let target = if level > T::zero() {
            level.powf(one / m)
        } else {
            T::zero()
        };
        y = half * (y + target);
    }
    Err(Error::NoConvergence {
        what: "prey-predator steady-state iteration",
        iterations: 10_000,
    })
}

/// Coefficients `(p, q)` of the zero-delay characteristic quadratic
/// `lambda^2 + p lambda + q` of the prey-predator model, evaluated literally
/// from the linearization matrix at the interior equilibrium.
///
/// Both are positive for every valid parameter set: using `b x* y*^(m-1) = c`
/// they collapse to `p = c(1-m) + (gamma/k) x*` and
/// `q = (gamma/k) x* c (1-m) + a b m x* y*^(2m-1)`, but the uncollapsed forms
/// are returned so finite-difference cross-checks stay independent.
pub fn prey_predator_tau0_quadratic<T: Real>(
    gamma: T,
    k: T,
    a: T,
    b: T,
    c: T,
    m: T,
) -> Result<(T, T)> {
    let one = T::one();
    let (x_star, y_star) = prey_predator_steady_state(gamma, k, a, b, c, m)?;
    let self_limit = gamma / k * x_star;
    let predator_gain = b * m * y_star.powf(m - one) * x_star;
    let p = c + self_limit - predator_gain;
    let q = self_limit * (c - predator_gain) + a * m * x_star * y_star.powf(m - one) * b * y_star.powf(m);
    Ok((p, q))
}

fn prey_predator<T: Real>(params: &BTreeMap<String, T>) -> Result<ModelSpec<T>> {
    const MODEL: &str = "prey_predator";
    reject_unknown(MODEL, params, &["gamma", "k", "a", "b", "c", "m", "tau"])?;
    let gamma = positive(MODEL, "gamma", require(MODEL, params, "gamma")?)?;
    let k = positive(MODEL, "k", require(MODEL, params, "k")?)?;
    let a = positive(MODEL, "a", require(MODEL, params, "a")?)?;
    let b = positive(MODEL, "b", require(MODEL, params, "b")?)?;
    let c = positive(MODEL, "c", require(MODEL, params, "c")?)?;
    let m = require(MODEL, params, "m")?;
    if !(m > T::zero() && m < T::one()) {
        return Err(Error::invalid(format!(
            "model '{MODEL}': parameter 'm' must lie strictly between 0 and 1 (got {m})"
        )));
    }
    let tau = delay_param(MODEL, params, "tau")?;

    let (x_star, y_star) = prey_predator_steady_state(gamma, k, a, b, c, m)?;
    let (ladder, slots) = delay_slots(&[tau]);
    let s = slots[0];
    let rhs: Rhs<T> = Arc::new(move |_t, x, delayed, dx| {
        let (x_lag, y_lag) = match s {
            Some(i) => (delayed[i][0], delayed[i][1]),
            None => (x[0], x[1]),
        };
        dx[0] = x[0] * (gamma * (T::one() - x[0] / k) - a * x[1].powf(m));
        dx[1] = b * x_lag * y_lag.powf(m) - c * x[1];
    });
    let system = DelaySystem::new(2, ladder.clone(), rhs)?;
    let default_history = HistoryFunction::constant(span_start(&ladder), &halved(&[x_star, y_star]))?;
    Ok(ModelSpec {
        name: MODEL,
        parameters: resolved(&[
            ("gamma", gamma),
            ("k", k),
            ("a", a),
            ("b", b),
            ("c", c),
            ("m", m),
            ("tau", tau),
        ]),
        system: Some(system),
        steady_states: vec![
            (vec![T::zero(), T::zero()], "extinction".into()),
            (vec![k, T::zero()], "predator-free equilibrium".into()),
            (vec![x_star, y_star], "interior equilibrium".into()),
        ],
        default_history,
        char_fun: None,
    })
}

// ---------------------------------------------------------------------------
// Growth with an Allee effect
// ---------------------------------------------------------------------------

/// The unique positive root `x* = (b + sqrt(b^2 + 4ac)) / (2c)` of
/// `a + b x - c x^2`; requires `a, c > 0` so the discriminant is positive.
pub fn allee_positive_equilibrium<T: Real>(a: T, b: T, c: T) -> Result<T> {
    let a = positive("allee", "a", a)?;
    let c = positive("allee", "c", c)?;
    let b = finite("allee", "b", b)?;
    let disc = b * b + cst::<T>(4.0) * a * c;
    Ok((b + disc.sqrt()) / (cst::<T>(2.0) * c))
}

fn allee<T: Real>(params: &BTreeMap<String, T>) -> Result<ModelSpec<T>> {
    const MODEL: &str = "allee";
    reject_unknown(MODEL, params, &["a", "b", "c", "tau"])?;
    let a = positive(MODEL, "a", require(MODEL, params, "a")?)?;
    let b = positive(MODEL, "b", require(MODEL, params, "b")?)?;
    let c = positive(MODEL, "c", require(MODEL, params, "c")?)?;
    let tau = delay_param(MODEL, params, "tau")?;
    let x_star = allee_positive_equilibrium(a, b, c)?;

    let (ladder, slots) = delay_slots(&[tau]);
    let s = slots[0];
    let rhs: Rhs<T> = Arc::new(move |_t, x, delayed, dx| {
        let lag = match s {
            Some(i) => delayed[i][0],
            None => x[0],
        };
        dx[0] = x[0] * (a + b * lag - c * lag * lag);
    });
    let system = DelaySystem::new(1, ladder.clone(), rhs)?;
    let default_history = HistoryFunction::constant(span_start(&ladder), &[x_star * cst(0.5)])?;
    Ok(ModelSpec {
        name: MODEL,
        parameters: resolved(&[("a", a), ("b", b), ("c", c), ("tau", tau)]),
        system: Some(system),
        steady_states: vec![
            (vec![T::zero()], "extinction".into()),
            (vec![x_star], "positive equilibrium".into()),
        ],
        default_history,
        char_fun: None,
    })
}

/// Maps a trajectory of the Allee model to deviation coordinates
/// `y = x / x* - 1`, in which the equation reads
/// `y'(t) = -(1 + y(t)) * y(t - tau) * alpha(t)` with the factor from
/// [`allee_alpha_factor`].
///
/// The map is affine, so it acts exactly on the stored cubic coefficients;
/// breakpoints and segment boundaries are preserved.
pub fn allee_transform<T: Real>(a: T, b: T, c: T, tr: &Trajectory<T>) -> Result<Trajectory<T>> {
    if tr.dimension() != 1 {
        return Err(Error::invalid(
            "deviation transform applies to the scalar model (dimension 1)",
        ));
    }
    let x_star = allee_positive_equilibrium(a, b, c)?;
    let segments = tr
        .segments()
        .iter()
        .map(|seg| {
            let coeffs = seg
                .coeffs
                .iter()
                .map(|row| {
                    let mut out = [T::zero(); 4];
                    for (o, r) in out.iter_mut().zip(row.iter()) {
                        *o = *r / x_star;
                    }
                    out[0] = out[0] - T::one();
                    out
                })
                .collect();
            CubicSegment {
                t_start: seg.t_start,
                t_end: seg.t_end,
                coeffs,
            }
        })
        .collect();
    Trajectory::new(segments, tr.breakpoints().to_vec())
}

/// The multiplier `alpha = x*(2 c x* - b) + c x*^2 y_lag` appearing in the
/// deviation form `y' = -(1 + y) y_lag alpha`; its running extrema give the
/// exponents of the oscillation envelope `e^(-M tau) <= 1 + y <= e^(L x* tau)`.
pub fn allee_alpha_factor<T: Real>(a: T, b: T, c: T, y_lag: T) -> Result<T> {
    let x_star = allee_positive_equilibrium(a, b, c)?;
    Ok(x_star * (cst::<T>(2.0) * c * x_star - b) + c * x_star * x_star * y_lag)
}

// ---------------------------------------------------------------------------
// Cooperative two-species model with saturating benefit
// ---------------------------------------------------------------------------

/// Newton iteration for the positive fixed point of
/// `x1 = (k1 + alpha1 x2)/(1 + x2)`, `x2 = (k2 + alpha2 x1)/(1 + x1)`,
/// started from the midpoint guesses `(k_i + alpha_i)/2`.
pub fn cooperative_steady_state<T: Real>(k: (T, T), alpha: (T, T)) -> Result<(T, T)> {
    let one = T::one();
    let g1 = |u: T| (k.0 + alpha.0 * u) / (one + u);
    let g2 = |u: T| (k.1 + alpha.1 * u) / (one + u);
    let d1 = |u: T| (alpha.0 - k.0) / ((one + u) * (one + u));
    let d2 = |u: T| (alpha.1 - k.1) / ((one + u) * (one + u));

    let half = cst::<T>(0.5);
    let mut x1 = (k.0 + alpha.0) * half;
    let mut x2 = (k.1 + alpha.1) * half;
    for _ in 0..10_000 {
        let f1 = x1 - g1(x2);
        let f2 = x2 - g2(x1);
        let scale = one + x1.abs() + x2.abs();
        if f1.abs().max(f2.abs()) <= cst::<T>(1e-14) * scale {
            for (component, v) in [(0usize, x1), (1usize, x2)] {
                if !(v > T::zero()) {
                    return Err(Error::NonpositiveSteadyState {
                        component,
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            return Ok((x1, x2));
        }
        // J = [[1, -g1'(x2)], [-g2'(x1), 1]]; solve J dx = f directly.
        let a12 = -d1(x2);
        let a21 = -d2(x1);
        let det = one - d1(x2) * d2(x1);
        if !det.is_finite() || det.abs() < cst(1e-14) {
            return Err(Error::Singular("cooperative fixed-point jacobian"));
        }
        x1 = x1 - (f1 - a12 * f2) / det;
        x2 = x2 - (f2 - a21 * f1) / det;
    }
    Err(Error::NoConvergence {
        what: "cooperative steady-state newton",
        iterations: 10_000,
    })
}

fn cooperative<T: Real>(params: &BTreeMap<String, T>) -> Result<ModelSpec<T>> {
    const MODEL: &str = "cooperative";
    reject_unknown(
        MODEL,
        params,
        &["r1", "r2", "k1", "k2", "alpha1", "alpha2", "tau1", "tau2"],
    )?;
    let r1 = positive(MODEL, "r1", require(MODEL, params, "r1")?)?;
    let r2 = positive(MODEL, "r2", require(MODEL, params, "r2")?)?;
    let k1 = positive(MODEL, "k1", require(MODEL, params, "k1")?)?;
    let k2 = positive(MODEL, "k2", require(MODEL, params, "k2")?)?;
    let alpha1 = positive(MODEL, "alpha1", require(MODEL, params, "alpha1")?)?;
    let alpha2 = positive(MODEL, "alpha2", require(MODEL, params, "alpha2")?)?;
    let tau1 = delay_param(MODEL, params, "tau1")?;
    let tau2 = delay_param(MODEL, params, "tau2")?;

    let star = cooperative_steady_state((k1, k2), (alpha1, alpha2))?;
    let (ladder, slots) = delay_slots(&[tau1, tau2]);
    let (s1, s2) = (slots[0], slots[1]);
    let rhs: Rhs<T> = Arc::new(move |_t, x, delayed, dx| {
        // Species 1 responds to lagged species 2 and vice versa.
        let x1_lag = match s1 {
            Some(i) => delayed[i][0],
            None => x[0],
        };
        let x2_lag = match s2 {
            Some(i) => delayed[i][1],
            None => x[1],
        };
        dx[0] = r1 * x[0] * ((k1 + alpha1 * x2_lag) / (T::one() + x2_lag) - x[0]);
        dx[1] = r2 * x[1] * ((k2 + alpha2 * x1_lag) / (T::one() + x1_lag) - x[1]);
    });
    let system = DelaySystem::new(2, ladder.clone(), rhs)?;
    let default_history = HistoryFunction::constant(span_start(&ladder), &halved(&[star.0, star.1]))?;
    Ok(ModelSpec {
        name: MODEL,
        parameters: resolved(&[
            ("r1", r1),
            ("r2", r2),
            ("k1", k1),
            ("k2", k2),
            ("alpha1", alpha1),
            ("alpha2", alpha2),
            ("tau1", tau1),
            ("tau2", tau2),
        ]),
        system: Some(system),
        steady_states: vec![
            (vec![T::zero(), T::zero()], "extinction".into()),
            (vec![k1, T::zero()], "species-2-free equilibrium".into()),
            (vec![T::zero(), k2], "species-1-free equilibrium".into()),
            (vec![star.0, star.1], "positive equilibrium".into()),
        ],
        default_history,
        char_fun: None,
    })
}

// ---------------------------------------------------------------------------
// Two-species competition with delayed birth and crowding terms
// ---------------------------------------------------------------------------

fn competition<T: Real>(params: &BTreeMap<String, T>) -> Result<ModelSpec<T>> {
    const MODEL: &str = "competition";
    reject_unknown(
        MODEL,
        params,
        &[
            "b1", "b2", "m1_const", "m1_self", "m1_cross", "m2_const", "m2_cross", "m2_self",
            "tau11", "tau12", "tau21", "tau22",
        ],
    )?;
    let b1 = positive(MODEL, "b1", require(MODEL, params, "b1")?)?;
    let b2 = positive(MODEL, "b2", require(MODEL, params, "b2")?)?;
    let m1_const = nonnegative(MODEL, "m1_const", require(MODEL, params, "m1_const")?)?;
    let m1_self = positive(MODEL, "m1_self", require(MODEL, params, "m1_self")?)?;
    let m1_cross = nonnegative(MODEL, "m1_cross", require(MODEL, params, "m1_cross")?)?;
    let m2_const = nonnegative(MODEL, "m2_const", require(MODEL, params, "m2_const")?)?;
    let m2_cross = nonnegative(MODEL, "m2_cross", require(MODEL, params, "m2_cross")?)?;
    let m2_self = positive(MODEL, "m2_self", require(MODEL, params, "m2_self")?)?;
    let tau11 = delay_param(MODEL, params, "tau11")?;
    let tau12 = delay_param(MODEL, params, "tau12")?;
    let tau21 = delay_param(MODEL, params, "tau21")?;
    let tau22 = delay_param(MODEL, params, "tau22")?;

    let (ladder, slots) = delay_slots(&[tau11, tau12, tau21, tau22]);
    let (s11, s12, s21, s22) = (slots[0], slots[1], slots[2], slots[3]);
    let rhs: Rhs<T> = Arc::new(move |_t, x, delayed, dx| {
        let x1_birth = match s11 {
            Some(i) => delayed[i][0],
            None => x[0],
        };
        let x2_crowd = match s12 {
            Some(i) => delayed[i][1],
            None => x[1],
        };
        let x1_crowd = match s21 {
            Some(i) => delayed[i][0],
            None => x[0],
        };
        let x2_birth = match s22 {
            Some(i) => delayed[i][1],
            None => x[1],
        };
        dx[0] = b1 * x1_birth - x[0] * (m1_const + m1_self * x[0] + m1_cross * x2_crowd);
        dx[1] = b2 * x2_birth - x[1] * (m2_const + m2_cross * x1_crowd + m2_self * x[1]);
    });
    let system = DelaySystem::new(2, ladder.clone(), rhs)?;

    let mut steady_states: Vec<(Vec<T>, String)> =
        vec![(vec![T::zero(), T::zero()], "extinction".into())];
    // Interior: both mortality balances hold, a 2x2 linear system.
    let interior = solve_dense(
        vec![vec![m1_self, m1_cross], vec![m2_cross, m2_self]],
        vec![b1 - m1_const, b2 - m2_const],
        "competition interior balance",
    )
    .ok()
    .filter(|x| x.iter().all(|v| *v > T::zero()));
    if let Some(state) = &interior {
        steady_states.push((state.clone(), "interior equilibrium".into()));
    }
    let x1_only = (b1 - m1_const) / m1_self;
    if x1_only > T::zero() {
        steady_states.push((vec![x1_only, T::zero()], "species-2-free equilibrium".into()));
    }
    let x2_only = (b2 - m2_const) / m2_self;
    if x2_only > T::zero() {
        steady_states.push((vec![T::zero(), x2_only], "species-1-free equilibrium".into()));
    }

    let anchor = interior.unwrap_or_else(|| vec![T::one(), T::one()]);
    let default_history = HistoryFunction::constant(span_start(&ladder), &halved(&anchor))?;
    Ok(ModelSpec {
        name: MODEL,
        parameters: resolved(&[
            ("b1", b1),
            ("b2", b2),
            ("m1_const", m1_const),
            ("m1_self", m1_self),
            ("m1_cross", m1_cross),
            ("m2_const", m2_const),
            ("m2_cross", m2_cross),
            ("m2_self", m2_self),
            ("tau11", tau11),
            ("tau12", tau12),
            ("tau21", tau21),
            ("tau22", tau22),
        ]),
        system: Some(system),
        steady_states,
        default_history,
        char_fun: None,
    })
}

fn nonnegative<T: Real>(model: &str, name: &str, value: T) -> Result<T> {
    if value.is_finite() && value >= T::zero() {
        Ok(value)
    } else {
        Err(Error::invalid(format!(
            "model '{model}': parameter '{name}' must be nonnegative and finite (got {value})"
        )))
    }
}

// ---------------------------------------------------------------------------
// Linear entries
// ---------------------------------------------------------------------------

/// `x'(t) + a x(t) + b x(t - tau) = 0`, the scalar linear feedback equation.
/// Serves both the plain entry and the linearized ventilation model (where
/// the caller supplies `b` as the loop gain at the equilibrium).
fn scalar_linear_entry<T: Real>(
    model: &'static str,
    params: &BTreeMap<String, T>,
    note: &str,
) -> Result<ModelSpec<T>> {
    reject_unknown(model, params, &["a", "b", "tau"])?;
    let a = finite(model, "a", require(model, params, "a")?)?;
    let b = finite(model, "b", require(model, params, "b")?)?;
    let tau = delay_param(model, params, "tau")?;

    let (ladder, slots) = delay_slots(&[tau]);
    let s = slots[0];
    let rhs: Rhs<T> = Arc::new(move |_t, x, delayed, dx| {
        let lag = match s {
            Some(i) => delayed[i][0],
            None => x[0],
        };
        dx[0] = -(a * x[0] + b * lag);
    });
    let system = DelaySystem::new(1, ladder.clone(), rhs)?;
    // lambda + a + b e^(-lambda tau); tau = 0 folds into the base.
    let char_fun = QuasiPolynomial::new(vec![a, T::one()], vec![(tau, vec![b])])?;
    let default_history = HistoryFunction::constant(span_start(&ladder), &[T::one()])?;
    Ok(ModelSpec {
        name: model,
        parameters: resolved(&[("a", a), ("b", b), ("tau", tau)]),
        system: Some(system),
        steady_states: vec![(vec![T::zero()], note.into())],
        default_history,
        char_fun: Some(char_fun),
    })
}

/// `y''(t) + a1 y'(t) + a0 y(t) = b y(t - tau)` as a first-order pair.
fn damped_secondorder<T: Real>(params: &BTreeMap<String, T>) -> Result<ModelSpec<T>> {
    const MODEL: &str = "damped_secondorder";
    reject_unknown(MODEL, params, &["a0", "a1", "b", "tau"])?;
    let a0 = finite(MODEL, "a0", require(MODEL, params, "a0")?)?;
    let a1 = finite(MODEL, "a1", require(MODEL, params, "a1")?)?;
    let b = finite(MODEL, "b", require(MODEL, params, "b")?)?;
    let tau = delay_param(MODEL, params, "tau")?;

    let (ladder, slots) = delay_slots(&[tau]);
    let s = slots[0];
    let rhs: Rhs<T> = Arc::new(move |_t, x, delayed, dx| {
        let lag = match s {
            Some(i) => delayed[i][0],
            None => x[0],
        };
        dx[0] = x[1];
        dx[1] = b * lag - a1 * x[1] - a0 * x[0];
    });
    let system = DelaySystem::new(2, ladder.clone(), rhs)?;
    // lambda^2 + a1 lambda + a0 - b e^(-lambda tau).
    let char_fun = QuasiPolynomial::new(vec![a0, a1, T::one()], vec![(tau, vec![-b])])?;
    let default_history = HistoryFunction::constant(span_start(&ladder), &[T::one(), T::zero()])?;
    Ok(ModelSpec {
        name: MODEL,
        parameters: resolved(&[("a0", a0), ("a1", a1), ("b", b), ("tau", tau)]),
        system: Some(system),
        steady_states: vec![(vec![T::zero(), T::zero()], "origin".into())],
        default_history,
        char_fun: Some(char_fun),
    })
}

/// `x'(t) + 2 x'(t - tau) = -x(t)`: the delayed-derivative example. The
/// characteristic function `lambda + 1 + 2 lambda e^(-lambda tau)` has a
/// delayed term of full degree, so the model is spectral-only here: the
/// method of steps handles retarded equations, not neutral ones.
fn neutral_example<T: Real>(params: &BTreeMap<String, T>) -> Result<ModelSpec<T>> {
    const MODEL: &str = "neutral_example";
    reject_unknown(MODEL, params, &["tau"])?;
    let tau = delay_param(MODEL, params, "tau")?;
    let char_fun = QuasiPolynomial::new(
        vec![T::one(), T::one()],
        vec![(tau, vec![T::zero(), cst(2.0)])],
    )?;
    let default_history = HistoryFunction::constant(-tau, &[T::one()])?;
    Ok(ModelSpec {
        name: MODEL,
        parameters: resolved(&[("tau", tau)]),
        system: None,
        steady_states: vec![(vec![T::zero()], "origin".into())],
        default_history,
        char_fun: Some(char_fun),
    })
}
