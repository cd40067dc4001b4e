//! Closed-form stability and oscillation criteria.
//!
//! Every test here encodes a sufficient condition: a passing check proves its
//! verdict, a failing check proves nothing, so failures come back as
//! `Unknown` with the reason, never as `Unstable`. Boundary comparisons are
//! performed exactly as written (no tolerance band), on products and sums
//! computed left to right from the given inputs.

use crate::error::{Error, Result};
use crate::scalar::{cst, Real};
use crate::spectral::hopf_point_scalar;
use crate::trajectory::Trajectory;
use crate::verdict::{Verdict, VerdictTag};

/// Oscillation dichotomy for `x'(t) = -a x(t - tau)` with `a, tau > 0`:
/// every nontrivial solution oscillates iff `a e tau > 1`; at or below 1 a
/// positive nonoscillatory solution exists.
pub fn oscillation_test_linear<T: Real>(a: T, tau: T) -> Result<Verdict> {
    for (name, v) in [("a", a), ("tau", tau)] {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::invalid(format!(
                "oscillation test needs {name} > 0, got {v}"
            )));
        }
    }
    let product = a * T::E() * tau;
    if product > T::one() {
        Ok(Verdict::proved(
            VerdictTag::Oscillatory,
            format!("every nontrivial solution oscillates: a*e*tau = {product} > 1"),
        ))
    } else {
        Ok(Verdict::proved(
            VerdictTag::Nonoscillatory,
            format!("a nonoscillatory solution exists: a*e*tau = {product} <= 1"),
        ))
    }
}

/// Delay-robust stability for the damped second-order equation
/// `x''(t) + a1 x'(t) + a0 x(t) = sum_j b_j x(t - tau_j)`.
///
/// Requires the dominance condition `a0 > sum |b_j|`; then either
/// damping beats the delayed feedback outright (criterion A,
/// `a1 > sum|b_j| / sqrt(a0 - sum|b_j|)`, delay-independent) or it beats the
/// delay-weighted feedback (criterion B, `a1 > sum |b_j| tau_j`, valid for
/// the given delays only).
pub fn stepan_discrete<T: Real>(a0: T, a1: T, b: &[T], tau: &[T]) -> Result<Verdict> {
    if b.len() != tau.len() {
        return Err(Error::invalid(format!(
            "feedback weights ({}) and delays ({}) must pair up",
            b.len(),
            tau.len()
        )));
    }
    for &t in tau {
        if !(t.is_finite() && t >= T::zero()) {
            return Err(Error::invalid(format!("delays must be >= 0, got {t}")));
        }
    }
    let strength: T = b.iter().fold(T::zero(), |acc, &v| acc + v.abs());
    if !(a0 > strength) {
        return Ok(Verdict::unknown(format!(
            "dominance precondition fails: a0 = {a0} is not greater than sum|b_j| = {strength}"
        )));
    }
    if a1 > strength / (a0 - strength).sqrt() {
        return Ok(Verdict::proved(
            VerdictTag::AbsolutelyStableInDelays,
            format!(
                "criterion A (delay-independent): a1 = {a1} > sum|b_j|/sqrt(a0 - sum|b_j|) = {}",
                strength / (a0 - strength).sqrt()
            ),
        ));
    }
    let weighted: T = b
        .iter()
        .zip(tau)
        .fold(T::zero(), |acc, (&bj, &tj)| acc + bj.abs() * tj);
    if a1 > weighted {
        return Ok(Verdict::proved(
            VerdictTag::AbsolutelyStableInDelays,
            format!(
                "criterion B: a1 = {a1} > sum|b_j| tau_j = {weighted}; uniformly asymptotically stable for these delays"
            ),
        ));
    }
    Ok(Verdict::unknown(format!(
        "neither criterion holds: a1 = {a1} vs A-threshold {} and B-threshold {weighted}",
        strength / (a0 - strength).sqrt()
    )))
}

/// A finite signed measure on `(-inf, 0]` given by atoms `(location, weight)`.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure<T> {
    atoms: Vec<(T, T)>,
}

impl<T: Real> DiscreteMeasure<T> {
    /// Atoms are `(theta_j, eta_j)` with `theta_j <= 0` (a lag of
    /// `-theta_j`); weights may carry either sign.
    pub fn new(atoms: Vec<(T, T)>) -> Result<Self> {
        for &(theta, eta) in &atoms {
            if !theta.is_finite() || !eta.is_finite() {
                return Err(Error::invalid("measure atoms must be finite"));
            }
            if theta > T::zero() {
                return Err(Error::invalid(format!(
                    "atom locations must lie in (-inf, 0], got {theta}"
                )));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    /// `sum |eta_j|`.
    pub fn total_variation(&self) -> T {
        self.atoms
            .iter()
            .fold(T::zero(), |acc, &(_, eta)| acc + eta.abs())
    }

    /// `integral |theta| d|eta| = sum |theta_j| |eta_j|`.
    pub fn first_abs_moment(&self) -> T {
        self.atoms
            .iter()
            .fold(T::zero(), |acc, &(theta, eta)| acc + theta.abs() * eta.abs())
    }
}

/// Distributed-memory variant of [`stepan_discrete`] for
/// `x''(t) + a1 x'(t) + a0 x(t) = integral x(t + theta) d eta(theta)` with an
/// atomic memory measure.
pub fn stepan_distributed<T: Real>(a0: T, a1: T, eta: &DiscreteMeasure<T>) -> Result<Verdict> {
    let total = eta.total_variation();
    if !(a0 > total) {
        return Ok(Verdict::unknown(format!(
            "dominance precondition fails: a0 = {a0} is not greater than total variation {total}"
        )));
    }
    if a1 > total / (a0 - total).sqrt() {
        return Ok(Verdict::proved(
            VerdictTag::AbsolutelyStableInDelays,
            format!(
                "criterion A (delay-independent): a1 = {a1} > eta/sqrt(a0 - eta) = {}",
                total / (a0 - total).sqrt()
            ),
        ));
    }
    let moment = eta.first_abs_moment();
    if a1 > moment {
        return Ok(Verdict::proved(
            VerdictTag::AbsolutelyStableInDelays,
            format!(
                "criterion B: a1 = {a1} > integral |theta| d|eta| = {moment}; stable for this memory profile"
            ),
        ));
    }
    Ok(Verdict::unknown(format!(
        "neither criterion holds: a1 = {a1} vs A-threshold {} and B-threshold {moment}",
        total / (a0 - total).sqrt()
    )))
}

/// Global stability of the delayed logistic equation at its positive
/// equilibrium: proved for `gamma tau <= 3/2`, and by a sharper argument up
/// to `37/24`. Beyond that nothing global is known, while at
/// `gamma tau = pi/2` the linearization loses local stability.
pub fn hutchinson_global_test<T: Real>(gamma: T, tau: T) -> Result<Verdict> {
    for (name, v) in [("gamma", gamma), ("tau", tau)] {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::invalid(format!(
                "logistic global test needs {name} > 0, got {v}"
            )));
        }
    }
    let product = gamma * tau;
    if product <= cst(1.5) {
        return Ok(Verdict::proved(
            VerdictTag::GloballyStable,
            format!("3/2 criterion: gamma*tau = {product} <= 3/2"),
        ));
    }
    if product <= cst::<T>(37.0) / cst(24.0) {
        return Ok(Verdict::proved(
            VerdictTag::GloballyStable,
            format!("37/24 refinement: gamma*tau = {product} <= 37/24"),
        ));
    }
    let crossing = hopf_point_scalar(T::zero(), gamma)?;
    Ok(Verdict::unknown(format!(
        "gamma*tau = {product} > 37/24; no global criterion applies; note the linearization's rightmost root reaches the imaginary axis at gamma*tau = pi/2 (tau = {} for this gamma)",
        crossing.tau0
    )))
}

/// Delay-robust linear stability of the two-species cooperative model
/// `x_i' = r_i x_i [(k_i + alpha_i x_j(t - tau_j)) / (1 + x_j(t - tau_j)) - x_i]`
/// (i, j swapped): positive parameters with `alpha_i > k_i` rule out
/// delay-induced switches entirely.
pub fn cooperative_absolute_test<T: Real>(r: (T, T), k: (T, T), alpha: (T, T)) -> Result<Verdict> {
    let named = [
        ("r1", r.0),
        ("r2", r.1),
        ("k1", k.0),
        ("k2", k.1),
        ("alpha1", alpha.0),
        ("alpha2", alpha.1),
    ];
    for (name, v) in named {
        if !v.is_finite() {
            return Err(Error::invalid(format!("{name} must be finite, got {v}")));
        }
        if !(v > T::zero()) {
            return Ok(Verdict::unknown(format!(
                "hypothesis fails: {name} = {v} is not positive"
            )));
        }
    }
    if !(alpha.0 > k.0) {
        return Ok(Verdict::unknown(format!(
            "hypothesis fails: alpha1 = {} is not greater than k1 = {}",
            alpha.0, k.0
        )));
    }
    if !(alpha.1 > k.1) {
        return Ok(Verdict::unknown(format!(
            "hypothesis fails: alpha2 = {} is not greater than k2 = {}",
            alpha.1, k.1
        )));
    }
    Ok(Verdict::proved(
        VerdictTag::AbsolutelyStableInDelays,
        "all parameters positive and alpha_i > k_i: linearly asymptotically stable for every choice of delays",
    ))
}

fn finite<T: Real>(v: T, what: &str, at: String) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{what} returned {v} at {at}")))
    }
}

/// Central finite difference of a scalar function, step scaled to the point.
fn fd1<T: Real>(f: &impl Fn(T) -> T, x: T, what: &str) -> Result<T> {
    let h = cst::<T>(1e-6) * x.abs().max(T::one());
    let hi = finite(f(x + h), what, format!("{}", x + h))?;
    let lo = finite(f(x - h), what, format!("{}", x - h))?;
    Ok((hi - lo) / (h + h))
}

/// Central finite difference of a bivariate function in its first or second
/// argument.
fn fd2<T: Real>(
    f: &impl Fn(T, T) -> T,
    x: (T, T),
    arg: usize,
    what: &str,
) -> Result<T> {
    let v = if arg == 0 { x.0 } else { x.1 };
    let h = cst::<T>(1e-6) * v.abs().max(T::one());
    let (pa, pb) = if arg == 0 {
        ((x.0 + h, x.1), (x.0 - h, x.1))
    } else {
        ((x.0, x.1 + h), (x.0, x.1 - h))
    };
    let hi = finite(f(pa.0, pa.1), what, format!("({}, {})", pa.0, pa.1))?;
    let lo = finite(f(pb.0, pb.1), what, format!("({}, {})", pb.0, pb.1))?;
    Ok((hi - lo) / (h + h))
}

/// Delay-independent local stability of the two-species competition model
///
/// `x1' = b1(x1(t - tau11)) - m1(x1(t), x2(t - tau12))`
/// `x2' = b2(x2(t - tau22)) - m2(x1(t - tau21), x2(t))`
///
/// checked numerically on the box `[0, probe.0] x [0, probe.1]`:
///
/// 1. condition (i): birth and death rates strictly increasing in every
///    argument, by central differences on a 20x20 interior grid;
/// 2. condition (ii): `b_i(0) = 0`, `m1(0, x2) = 0`, `m2(x1, 0) = 0` along
///    the axes;
/// 3. condition (iii): the supplied single-species equilibria are positive
///    and balance birth against death in the absence of the competitor;
/// 4. condition (iv): at the box's far edges the death rate strictly exceeds
///    the birth rate whatever the competitor does (edge sampling, so numeric
///    evidence rather than proof);
/// 5. condition (v): the supplied coexistence state `(alpha, beta)` is a
///    steady state;
/// 6. condition (vi): at `(alpha, beta)`, self-limitation dominates:
///    `dm1/dx1 > db1/dx1 + dm2/dx1` and `dm2/dx2 > db2/dx2 + dm1/dx2`.
///
/// All six passing yields `AbsolutelyStableInDelays`; the first failure
/// yields `Unknown` naming the condition.
#[allow(clippy::too_many_arguments)]
pub fn competition_delay_independent_test<T: Real>(
    b1: impl Fn(T) -> T,
    b2: impl Fn(T) -> T,
    m1: impl Fn(T, T) -> T,
    m2: impl Fn(T, T) -> T,
    steady_state: (T, T),
    boundary_equilibria: (T, T),
    probe_box: (T, T),
) -> Result<Verdict> {
    let (p1, p2) = probe_box;
    if !(p1.is_finite() && p1 > T::zero() && p2.is_finite() && p2 > T::zero()) {
        return Err(Error::invalid(format!(
            "probe box corner must be positive and finite, got ({p1}, {p2})"
        )));
    }
    let (sa, sb) = steady_state;
    if !(sa > T::zero() && sa < p1 && sb > T::zero() && sb < p2) {
        return Err(Error::invalid(format!(
            "steady state ({sa}, {sb}) must lie strictly inside the probe box (0, {p1}) x (0, {p2})"
        )));
    }
    let tol = cst::<T>(1e-8);
    let grid = 20usize;
    let gridf = cst::<T>(grid as f64);

    // (i) strict monotonicity on the interior grid (coordinates > 0).
    for g in 0..grid {
        let x1 = p1 * cst::<T>((g + 1) as f64) / gridf;
        let d = fd1(&b1, x1, "b1")?;
        if !(d > T::zero()) {
            return Ok(Verdict::unknown(format!(
                "condition (i) fails: db1/dx1 = {d} at x1 = {x1} is not positive"
            )));
        }
        let x2 = p2 * cst::<T>((g + 1) as f64) / gridf;
        let d = fd1(&b2, x2, "b2")?;
        if !(d > T::zero()) {
            return Ok(Verdict::unknown(format!(
                "condition (i) fails: db2/dx2 = {d} at x2 = {x2} is not positive"
            )));
        }
    }
    for gi in 0..grid {
        for gj in 0..grid {
            let pt = (
                p1 * cst::<T>((gi + 1) as f64) / gridf,
                p2 * cst::<T>((gj + 1) as f64) / gridf,
            );
            for (f, name) in [(&m1 as &dyn Fn(T, T) -> T, "m1"), (&m2, "m2")] {
                for arg in 0..2 {
                    let d = fd2(&f, pt, arg, name)?;
                    if !(d > T::zero()) {
                        return Ok(Verdict::unknown(format!(
                            "condition (i) fails: d{name}/dx{} = {d} at ({}, {}) is not positive",
                            arg + 1,
                            pt.0,
                            pt.1
                        )));
                    }
                }
            }
        }
    }

    // (ii) rates vanish with their own species along the axes.
    for (v, name) in [
        (finite(b1(T::zero()), "b1", "0".into())?, "b1(0)"),
        (finite(b2(T::zero()), "b2", "0".into())?, "b2(0)"),
    ] {
        if v.abs() > tol {
            return Ok(Verdict::unknown(format!(
                "condition (ii) fails: {name} = {v} is not zero"
            )));
        }
    }
    for g in 0..=grid {
        let x2 = p2 * cst::<T>(g as f64) / gridf;
        let v = finite(m1(T::zero(), x2), "m1", format!("(0, {x2})"))?;
        if v.abs() > tol {
            return Ok(Verdict::unknown(format!(
                "condition (ii) fails: m1(0, {x2}) = {v} is not zero"
            )));
        }
        let x1 = p1 * cst::<T>(g as f64) / gridf;
        let v = finite(m2(x1, T::zero()), "m2", format!("({x1}, 0)"))?;
        if v.abs() > tol {
            return Ok(Verdict::unknown(format!(
                "condition (ii) fails: m2({x1}, 0) = {v} is not zero"
            )));
        }
    }

    // (iii) single-species equilibria.
    let (e1, e2) = boundary_equilibria;
    if !(e1 > T::zero() && e2 > T::zero()) {
        return Ok(Verdict::unknown(format!(
            "condition (iii) fails: boundary equilibria ({e1}, {e2}) must be positive"
        )));
    }
    let r1 = finite(b1(e1), "b1", format!("{e1}"))? - finite(m1(e1, T::zero()), "m1", format!("({e1}, 0)"))?;
    if r1.abs() > tol {
        return Ok(Verdict::unknown(format!(
            "condition (iii) fails: b1 - m1(., 0) = {r1} at x1 = {e1}"
        )));
    }
    let r2 = finite(b2(e2), "b2", format!("{e2}"))? - finite(m2(T::zero(), e2), "m2", format!("(0, {e2})"))?;
    if r2.abs() > tol {
        return Ok(Verdict::unknown(format!(
            "condition (iii) fails: b2 - m2(0, .) = {r2} at x2 = {e2}"
        )));
    }

    // (iv) at the far edges, death strictly exceeds birth for any competitor
    // density in the box.
    for g in 0..=grid {
        let x2 = p2 * cst::<T>(g as f64) / gridf;
        let v = finite(b1(p1), "b1", format!("{p1}"))?
            - finite(m1(p1, x2), "m1", format!("({p1}, {x2})"))?;
        if !(v < T::zero()) {
            return Ok(Verdict::unknown(format!(
                "condition (iv) fails: b1(delta1) - m1(delta1, x2) = {v} at delta1 = {p1}, x2 = {x2} is not negative"
            )));
        }
        let x1 = p1 * cst::<T>(g as f64) / gridf;
        let v = finite(b2(p2), "b2", format!("{p2}"))?
            - finite(m2(x1, p2), "m2", format!("({x1}, {p2})"))?;
        if !(v < T::zero()) {
            return Ok(Verdict::unknown(format!(
                "condition (iv) fails: b2(delta2) - m2(x1, delta2) = {v} at delta2 = {p2}, x1 = {x1} is not negative"
            )));
        }
    }

    // (v) the coexistence state balances.
    let r1 = finite(b1(sa), "b1", format!("{sa}"))?
        - finite(m1(sa, sb), "m1", format!("({sa}, {sb})"))?;
    let r2 = finite(b2(sb), "b2", format!("{sb}"))?
        - finite(m2(sa, sb), "m2", format!("({sa}, {sb})"))?;
    if r1.abs() > tol || r2.abs() > tol {
        return Ok(Verdict::unknown(format!(
            "condition (v) fails: residuals ({r1}, {r2}) at the steady state ({sa}, {sb})"
        )));
    }

    // (vi) self-limitation dominates at the coexistence state.
    let dm1_dx1 = fd2(&m1, steady_state, 0, "m1")?;
    let dm1_dx2 = fd2(&m1, steady_state, 1, "m1")?;
    let dm2_dx1 = fd2(&m2, steady_state, 0, "m2")?;
    let dm2_dx2 = fd2(&m2, steady_state, 1, "m2")?;
    let db1 = fd1(&b1, sa, "b1")?;
    let db2 = fd1(&b2, sb, "b2")?;
    if !(dm1_dx1 > db1 + dm2_dx1) {
        return Ok(Verdict::unknown(format!(
            "condition (vi) fails: dm1/dx1 = {dm1_dx1} is not greater than db1/dx1 + dm2/dx1 = {}",
            db1 + dm2_dx1
        )));
    }
    if !(dm2_dx2 > db2 + dm1_dx2) {
        return Ok(Verdict::unknown(format!(
            "condition (vi) fails: dm2/dx2 = {dm2_dx2} is not greater than db2/dx2 + dm1/dx2 = {}",
            db2 + dm1_dx2
        )));
    }

    Ok(Verdict::numeric(
        VerdictTag::AbsolutelyStableInDelays,
        format!(
            "conditions (i)-(vi) verified on [0, {p1}] x [0, {p2}]: (i) and (iv) by grid/edge sampling (numeric evidence), (ii), (iii), (v) by residuals < 1e-8, (vi) by finite differences at ({sa}, {sb})"
        ),
    ))
}

/// Lyapunov-style functional along a computed Lotka-Volterra trajectory:
///
/// `v(t) = sum_i |log(x_i(t)/x*_i)|
///        + sum_ij |b_ij| integral_{t - tau_ij}^{t} |x_j(s) - x*_j| ds`.
///
/// Sampled at every trajectory segment boundary from `t0 + max tau_ij`
/// onward; the integrals use composite trapezoid over the segment boundaries
/// inside each lag window plus the exact window endpoints. Along a stable
/// run the series should decay toward zero; its failure to decrease is
/// evidence against the candidate functional, not against the trajectory.
pub fn lyapunov_lv_monitor<T: Real>(
    tr: &Trajectory<T>,
    x_star: &[T],
    b_weights: &[Vec<T>],
    delays: &[Vec<T>],
) -> Result<Vec<(T, T)>> {
    let n = tr.dimension();
    if x_star.len() != n
        || b_weights.len() != n
        || delays.len() != n
        || b_weights.iter().any(|row| row.len() != n)
        || delays.iter().any(|row| row.len() != n)
    {
        return Err(Error::invalid(format!(
            "expected {n}-vector x_star and {n}x{n} weight and delay matrices"
        )));
    }
    for (i, &v) in x_star.iter().enumerate() {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::NonpositiveState {
                component: i,
                t: f64::NAN,
            });
        }
    }
    let mut tau_max = T::zero();
    for row in delays {
        for &t in row {
            if !(t.is_finite() && t >= T::zero()) {
                return Err(Error::invalid(format!("delays must be >= 0, got {t}")));
            }
            tau_max = tau_max.max(t);
        }
    }

    // Segment boundaries of the trajectory, as both the sample grid and the
    // quadrature nodes.
    let mut knots: Vec<T> = tr.segments().iter().map(|s| s.t_start).collect();
    knots.push(tr.t_end());

    let state = |t: T| tr.eval(t);
    let first_sample = tr.t0() + tau_max;
    let mut series = Vec::new();
    for &t in &knots {
        if t < first_sample {
            continue;
        }
        let x = state(t)?;
        let mut v = T::zero();
        for i in 0..n {
            if !(x[i] > T::zero()) {
                return Err(Error::NonpositiveState {
                    component: i,
                    t: t.to_f64().unwrap_or(f64::NAN),
                });
            }
            v += (x[i] / x_star[i]).ln().abs();
        }
        for i in 0..n {
            for j in 0..n {
                let w = b_weights[i][j].abs();
                let tau = delays[i][j];
                if w == T::zero() || tau == T::zero() {
                    continue;
                }
                v += w * trapezoid_abs_dev(tr, j, x_star[j], t - tau, t, &knots)?;
            }
        }
        series.push((t, v));
    }
    Ok(series)
}

/// `integral_a^b |x_c(s) - target| ds` by trapezoid over the trajectory knots
/// that fall inside `(a, b)`, plus the exact endpoints.
fn trapezoid_abs_dev<T: Real>(
    tr: &Trajectory<T>,
    component: usize,
    target: T,
    a: T,
    b: T,
    knots: &[T],
) -> Result<T> {
    let f = |s: T| -> Result<T> { Ok((tr.eval_component(component, s)? - target).abs()) };
    let mut prev_t = a;
    let mut prev_f = f(a)?;
    let mut acc = T::zero();
    let half = cst::<T>(0.5);
    let lo = knots.partition_point(|&k| k <= a);
    for &k in &knots[lo..] {
        if k >= b {
            break;
        }
        let fk = f(k)?;
        acc += (k - prev_t) * (prev_f + fk) * half;
        prev_t = k;
        prev_f = fk;
    }
    let fb = f(b)?;
    acc += (b - prev_t) * (prev_f + fb) * half;
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::HistoryFunction;
    use crate::stepper::{integrate, IntegratorOptions};
    use crate::system::DelaySystem;
    use std::sync::Arc;

    #[test]
    fn oscillation_dichotomy_on_both_sides() {
        let v = oscillation_test_linear(2.0, 1.0).unwrap();
        assert_eq!(v.tag, VerdictTag::Oscillatory);
        let v = oscillation_test_linear(0.1, 0.5).unwrap();
        assert_eq!(v.tag, VerdictTag::Nonoscillatory);
        assert!(oscillation_test_linear(-1.0, 1.0).is_err());
        assert!(oscillation_test_linear(1.0, 0.0).is_err());
    }

    #[test]
    fn oscillation_boundary_is_inclusive() {
        // a e tau with a = 1, tau = 1/e lands exactly on 1 in f64.
        let v = oscillation_test_linear(1.0, 1.0 / std::f64::consts::E).unwrap();
        assert_eq!(v.tag, VerdictTag::Nonoscillatory);
    }

    #[test]
    fn damped_feedback_criteria_follow_the_inequalities() {
        let v = stepan_discrete(2.0, 3.0, &[1.0], &[1.0]).unwrap();
        assert_eq!(v.tag, VerdictTag::AbsolutelyStableInDelays);
        assert!(v.justification.contains("criterion A"));

        let v = stepan_discrete(2.0, 0.5, &[1.0], &[5.0]).unwrap();
        assert_eq!(v.tag, VerdictTag::Unknown);

        // Dominance precondition.
        let v = stepan_discrete(0.5, 3.0, &[1.0], &[1.0]).unwrap();
        assert_eq!(v.tag, VerdictTag::Unknown);
        assert!(v.justification.contains("precondition"));

        // Zero coupling: damped oscillator, stable whenever a1 > 0.
        let v = stepan_discrete(2.0, 0.01, &[0.0, 0.0], &[1.0, 7.0]).unwrap();
        assert_eq!(v.tag, VerdictTag::AbsolutelyStableInDelays);

        // Criterion B catches short delays where A fails: A-threshold is
        // 2/sqrt(2) = 1.414 > a1 = 1, B-threshold 2 * 0.3 = 0.6 < 1.
        let v = stepan_discrete(4.0, 1.0, &[2.0], &[0.3]).unwrap();
        assert_eq!(v.tag, VerdictTag::AbsolutelyStableInDelays);
        assert!(v.justification.contains("criterion B"));

        assert!(stepan_discrete(2.0, 3.0, &[1.0], &[]).is_err());
        assert!(stepan_discrete(2.0, 3.0, &[1.0], &[-0.1]).is_err());
    }

    #[test]
    fn distributed_matches_discrete_on_single_atoms() {
        let eta = DiscreteMeasure::new(vec![(-1.0, 1.0)]).unwrap();
        let via_measure = stepan_distributed(2.0, 3.0, &eta).unwrap();
        let via_delays = stepan_discrete(2.0, 3.0, &[1.0], &[1.0]).unwrap();
        assert_eq!(via_measure.tag, via_delays.tag);
        assert_eq!(via_measure.tag, VerdictTag::AbsolutelyStableInDelays);
    }

    #[test]
    fn distributed_two_atom_example() {
        let eta: DiscreteMeasure<f64> = DiscreteMeasure::new(vec![(-0.5, 0.4), (-1.5, 0.4)]).unwrap();
        assert!((eta.total_variation() - 0.8).abs() < 1e-15);
        let v = stepan_distributed(2.0, 1.0, &eta).unwrap();
        // 0.8 / sqrt(1.2) = 0.7303 < 1.
        assert_eq!(v.tag, VerdictTag::AbsolutelyStableInDelays);
        assert!(v.justification.contains("criterion A"));
    }

    #[test]
    fn distributed_precondition_and_atom_validation() {
        let eta = DiscreteMeasure::new(vec![(-1.0, 0.8)]).unwrap();
        let v = stepan_distributed(0.5, 3.0, &eta).unwrap();
        assert_eq!(v.tag, VerdictTag::Unknown);
        assert!(DiscreteMeasure::new(vec![(0.5, 1.0)]).is_err());
        assert!(DiscreteMeasure::new(vec![(f64::NAN, 1.0)]).is_err());
    }

    #[test]
    fn logistic_global_thresholds() {
        let v = hutchinson_global_test(1.0, 1.4).unwrap();
        assert_eq!(v.tag, VerdictTag::GloballyStable);
        assert!(v.justification.contains("3/2"));

        let v = hutchinson_global_test(1.0, 1.52).unwrap();
        assert_eq!(v.tag, VerdictTag::GloballyStable);
        assert!(v.justification.contains("37/24"));

        let v = hutchinson_global_test(1.0, 1.6).unwrap();
        assert_eq!(v.tag, VerdictTag::Unknown);
        assert!(v.justification.contains("pi/2"));

        assert!(hutchinson_global_test(0.0, 1.0).is_err());
    }

    #[test]
    fn logistic_boundary_cases_are_inclusive() {
        let v = hutchinson_global_test(1.0, 1.5).unwrap();
        assert!(v.justification.contains("3/2"));
        let v = hutchinson_global_test(1.0, 37.0 / 24.0).unwrap();
        assert_eq!(v.tag, VerdictTag::GloballyStable);
        assert!(v.justification.contains("37/24"));
    }

    #[test]
    fn cooperative_hypotheses_checked_in_order() {
        let v = cooperative_absolute_test((1.0, 1.0), (1.0, 2.0), (2.0, 3.0)).unwrap();
        assert_eq!(v.tag, VerdictTag::AbsolutelyStableInDelays);

        let v = cooperative_absolute_test((1.0, 1.0), (1.0, 2.0), (0.5, 3.0)).unwrap();
        assert_eq!(v.tag, VerdictTag::Unknown);
        assert!(v.justification.contains("alpha1"));

        let v = cooperative_absolute_test((1.0, 1.0), (-1.0, 2.0), (2.0, 3.0)).unwrap();
        assert_eq!(v.tag, VerdictTag::Unknown);
        assert!(v.justification.contains("k1"));
    }

    #[test]
    fn competition_worked_instance_passes_all_conditions() {
        let v = competition_delay_independent_test(
            |x: f64| 2.0 * x,
            |x| 2.0 * x,
            |x1, x2| x1 * (1.0 + 3.0 * x1 + x2),
            |x1, x2| x2 * (1.0 + x1 + 3.0 * x2),
            (0.25, 0.25),
            (1.0 / 3.0, 1.0 / 3.0),
            (1.0, 1.0),
        )
        .unwrap();
        assert_eq!(v.tag, VerdictTag::AbsolutelyStableInDelays);
    }

    #[test]
    fn competition_symmetric_variant_fails_condition_vi() {
        let v = competition_delay_independent_test(
            |x: f64| 2.0 * x,
            |x| 2.0 * x,
            |x1, x2| x1 * (1.0 + x1 + 2.0 * x2),
            |x1, x2| x2 * (1.0 + 2.0 * x1 + x2),
            (1.0 / 3.0, 1.0 / 3.0),
            (1.0, 1.0),
            (1.5, 1.5),
        )
        .unwrap();
        assert_eq!(v.tag, VerdictTag::Unknown);
        assert!(v.justification.contains("(vi)"), "{}", v.justification);
    }

    #[test]
    fn competition_nonvanishing_birth_rate_fails_condition_ii() {
        let v = competition_delay_independent_test(
            |x: f64| 2.0 * x + 0.1,
            |x| 2.0 * x,
            |x1, x2| x1 * (1.0 + 3.0 * x1 + x2),
            |x1, x2| x2 * (1.0 + x1 + 3.0 * x2),
            (0.25, 0.25),
            (1.0 / 3.0, 1.0 / 3.0),
            (1.0, 1.0),
        )
        .unwrap();
        assert_eq!(v.tag, VerdictTag::Unknown);
        assert!(v.justification.contains("(ii)"), "{}", v.justification);
    }

    #[test]
    fn competition_rejects_steady_state_outside_probe_box() {
        let r = competition_delay_independent_test(
            |x: f64| 2.0 * x,
            |x| 2.0 * x,
            |x1, x2| x1 * (1.0 + 3.0 * x1 + x2),
            |x1, x2| x2 * (1.0 + x1 + 3.0 * x2),
            (2.0, 0.25),
            (1.0 / 3.0, 1.0 / 3.0),
            (1.0, 1.0),
        );
        assert!(r.is_err());
    }

    fn logistic_run(gamma: f64, tau: f64, t_end: f64) -> Trajectory<f64> {
        let rhs = Arc::new(move |_t: f64, x: &[f64], d: &[Vec<f64>], dx: &mut [f64]| {
            dx[0] = gamma * x[0] * (1.0 - d[0][0]);
        });
        let sys = DelaySystem::new(1, vec![tau], rhs).unwrap();
        let h = HistoryFunction::constant(-tau, &[0.5]).unwrap();
        integrate(&sys, &h, &IntegratorOptions::new(tau / 100.0, t_end)).unwrap()
    }

    #[test]
    fn monitor_vanishes_on_a_constant_trajectory() {
        let rhs = Arc::new(move |_t: f64, _x: &[f64], _d: &[Vec<f64>], dx: &mut [f64]| {
            dx[0] = 0.0;
        });
        let sys = DelaySystem::new(1, vec![0.5], rhs).unwrap();
        let h = HistoryFunction::constant(-0.5, &[1.0]).unwrap();
        let tr = integrate(&sys, &h, &IntegratorOptions::new(0.05, 5.0)).unwrap();
        let series = lyapunov_lv_monitor(&tr, &[1.0], &[vec![0.3]], &[vec![0.5]]).unwrap();
        assert!(!series.is_empty());
        for (_, v) in series {
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn monitor_is_nonnegative_and_decays_on_a_stable_logistic_run() {
        // gamma tau = 0.3, well inside the monotone-stability region.
        let tr = logistic_run(1.0, 0.3, 40.0);
        let series = lyapunov_lv_monitor(&tr, &[1.0], &[vec![1.0]], &[vec![0.3]]).unwrap();
        assert!(series.len() > 100);
        for w in series.windows(2) {
            assert!(w[0].1 >= 0.0);
            assert!(
                w[1].1 <= w[0].1 + 1e-6,
                "v rose from {} to {} at t = {}",
                w[0].1,
                w[1].1,
                w[1].0
            );
        }
        let last = series.last().unwrap();
        assert!(last.1 < 1e-6, "v({}) = {}", last.0, last.1);
    }

    #[test]
    fn monitor_rejects_bad_shapes_and_nonpositive_targets() {
        let tr = logistic_run(1.0, 0.3, 2.0);
        assert!(lyapunov_lv_monitor(&tr, &[1.0, 2.0], &[vec![1.0]], &[vec![0.3]]).is_err());
        assert!(matches!(
            lyapunov_lv_monitor(&tr, &[0.0], &[vec![1.0]], &[vec![0.3]]),
            Err(Error::NonpositiveState { component: 0, .. })
        ));
        assert!(lyapunov_lv_monitor(&tr, &[1.0], &[vec![1.0]], &[vec![-0.3]]).is_err());
    }

    #[test]
    fn monitor_integral_term_matches_hand_quadrature_on_a_linear_segment() {
        // Trajectory x(t) = t on [0, 1] (x' = 1), x* = 1, single delay 0.2,
        // weight 2: v(t) = |log t| + 2 * int_{t-0.2}^t |s - 1| ds; at t = 1
        // the integral is int_{0.8}^{1} (1 - s) ds = 0.02.
        let rhs = Arc::new(move |_t: f64, _x: &[f64], _d: &[Vec<f64>], dx: &mut [f64]| {
            dx[0] = 1.0;
        });
        let sys = DelaySystem::new(1, vec![0.2], rhs).unwrap();
        let h = HistoryFunction::polynomial(-0.2, vec![vec![0.0, 1.0]]).unwrap();
        let tr = integrate(&sys, &h, &IntegratorOptions::new(0.01, 1.0)).unwrap();
        let series = lyapunov_lv_monitor(&tr, &[1.0], &[vec![2.0]], &[vec![0.2]]).unwrap();
        let (t_last, v_last) = *series.last().unwrap();
        assert!((t_last - 1.0).abs() < 1e-12);
        assert!((v_last - 0.04).abs() < 1e-10, "v(1) = {v_last}");
    }
}
