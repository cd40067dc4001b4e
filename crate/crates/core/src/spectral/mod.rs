//! Spectral analysis: characteristic quasi-polynomials, linearization at
//! steady states, root location by the argument principle, Hopf crossing
//! delays, Routh-Hurwitz for planar systems, and stability-switch scans.

mod poly;
mod rootfind;
mod sweep;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cst, Real};
use crate::system::DelaySystem;
use crate::verdict::{Verdict, VerdictTag};
use poly::Poly;

pub use rootfind::{rightmost_root, roots_in_rectangle, RightmostReport};
pub use sweep::{
    stability_switch_scan, ScanOutcome, ScanSample, SwitchDirection, SwitchEvent,
};

/// Characteristic function `D(lambda) = P0(lambda) + sum_k Pk(lambda) e^(-lambda tau_k)`
/// with real coefficients and positive, distinct delays.
///
/// Invariants: delays strictly positive and ascending with zero-delay terms
/// merged into the base; `P0` nonzero with degree >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPolynomial<T> {
    base: Poly<T>,
    delayed: Vec<(T, Poly<T>)>,
}

impl<T: Real> QuasiPolynomial<T> {
    /// Builds a quasi-polynomial from coefficient lists in ascending powers.
    ///
    /// Delayed terms with `tau <= 1e-12` are folded into the base (the tau = 0
    /// degeneration); duplicate delays are combined by adding coefficients.
    pub fn new(base: Vec<T>, delayed: Vec<(T, Vec<T>)>) -> Result<Self> {
        if base.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("base coefficients must be finite"));
        }
        for (tau, coeffs) in &delayed {
            if !tau.is_finite() || *tau < T::zero() {
                return Err(Error::invalid("delays must be finite and nonnegative"));
            }
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("delayed coefficients must be finite"));
            }
        }
        let q = Self::from_parts(
            Poly::new(base),
            delayed
                .into_iter()
                .map(|(tau, coeffs)| (tau, Poly::new(coeffs)))
                .collect(),
        );
        if q.base.is_zero() || q.base.degree() < 1 {
            return Err(Error::invalid(
                "base polynomial must be nonzero with degree >= 1",
            ));
        }
        Ok(q)
    }

    /// Normalizes parts without the public degree requirement (intermediate
    /// matrix entries during determinant expansion may have constant bases).
    fn from_parts(mut base: Poly<T>, terms: Vec<(T, Poly<T>)>) -> Self {
        let mut sorted: Vec<(T, Poly<T>)> = Vec::with_capacity(terms.len());
        let mut terms = terms;
        terms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (tau, p) in terms {
            if p.is_zero() {
                continue;
            }
            if tau <= cst(1e-12) {
                base = base.add(&p);
                continue;
            }
            match sorted.last_mut() {
                Some((last_tau, last_p))
                    if (tau - *last_tau).abs() <= cst::<T>(1e-12) * tau.max(T::one()) =>
                {
                    *last_p = last_p.add(&p);
                }
                _ => sorted.push((tau, p)),
            }
        }
        sorted.retain(|(_, p)| !p.is_zero());
        QuasiPolynomial {
            base,
            delayed: sorted,
        }
    }

    /// Base coefficients `P0`, ascending powers.
    pub fn base_coeffs(&self) -> &[T] {
        &self.base.coeffs
    }

    /// Delayed terms as `(tau_k, coefficients of Pk)`, ascending in `tau`.
    pub fn delayed_terms(&self) -> Vec<(T, &[T])> {
        self.delayed
            .iter()
            .map(|(tau, p)| (*tau, p.coeffs.as_slice()))
            .collect()
    }

    /// Degree of the base polynomial.
    pub fn degree(&self) -> usize {
        self.base.degree()
    }

    /// Sum of all delays; bounds the phase rate of the exponential factors.
    pub(crate) fn total_delay(&self) -> T {
        self.delayed
            .iter()
            .fold(T::zero(), |acc, (tau, _)| acc + *tau)
    }

    /// Evaluates `D(z)`.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let mut acc = self.base.eval(z);
        for (tau, p) in &self.delayed {
            acc += p.eval(z) * (-z * *tau).exp();
        }
        acc
    }

    /// Evaluates `D(z)` and the analytic derivative
    /// `D'(z) = P0'(z) + sum_k (Pk'(z) - tau_k Pk(z)) e^(-z tau_k)`.
    pub fn eval_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut d = self.base.eval(z);
        let mut dp = self.base.derivative().eval(z);
        for (tau, p) in &self.delayed {
            let e = (-z * *tau).exp();
            let pv = p.eval(z);
            d += pv * e;
            dp += (p.derivative().eval(z) - pv * *tau) * e;
        }
        (d, dp)
    }

    /// Magnitude scale of the terms composing `D` near `z`: used to turn
    /// absolute residual tolerances into relative ones.
    pub(crate) fn term_scale(&self, z: Complex<T>) -> T {
        let rho = z.norm();
        let mut acc = self.base.abs_eval(rho);
        for (tau, p) in &self.delayed {
            acc += p.abs_eval(rho) * (-*tau * z.re).exp();
        }
        acc
    }

    /// Product of two characteristic functions (delays add across terms).
    pub fn mul(&self, other: &QuasiPolynomial<T>) -> QuasiPolynomial<T> {
        let mut terms: Vec<(T, Poly<T>)> = Vec::new();
        let base = self.base.mul(&other.base);
        for (tau, p) in &self.delayed {
            terms.push((*tau, p.mul(&other.base)));
        }
        for (tau, p) in &other.delayed {
            terms.push((*tau, p.mul(&self.base)));
        }
        for (tau_a, pa) in &self.delayed {
            for (tau_b, pb) in &other.delayed {
                terms.push((*tau_a + *tau_b, pa.mul(pb)));
            }
        }
        QuasiPolynomial::from_parts(base, terms)
    }

    /// Difference of two characteristic functions.
    pub fn sub(&self, other: &QuasiPolynomial<T>) -> QuasiPolynomial<T> {
        let mut terms: Vec<(T, Poly<T>)> =
            self.delayed.iter().map(|(t, p)| (*t, p.clone())).collect();
        terms.extend(other.delayed.iter().map(|(t, p)| (*t, p.neg())));
        QuasiPolynomial::from_parts(self.base.sub(&other.base), terms)
    }
}

/// Evaluates a characteristic function at a complex point.
pub fn charfun_eval<T: Real>(q: &QuasiPolynomial<T>, z: Complex<T>) -> Complex<T> {
    q.eval(z)
}

/// Closed search rectangle `[re_min, re_max] x [-im_max, im_max]` for
/// characteristic roots (conjugate symmetry makes the lower half implicit in
/// reports, but the contour covers the full rectangle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootWindow<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_max: T,
}

impl<T: Real> RootWindow<T> {
    pub fn new(re_min: T, re_max: T, im_max: T) -> Result<Self> {
        let w = RootWindow {
            re_min,
            re_max,
            im_max,
        };
        w.validate()?;
        Ok(w)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.re_min < self.re_max) || !(self.im_max > T::zero()) {
            return Err(Error::invalid(
                "root window needs re_min < re_max and im_max > 0",
            ));
        }
        if !self.re_min.is_finite() || !self.re_max.is_finite() || !self.im_max.is_finite() {
            return Err(Error::invalid("root window bounds must be finite"));
        }
        Ok(())
    }

    /// Default window `[-5, 1] x [-50, 50]`: covers every crossing frequency
    /// arising in the bundled models at desk-scale parameters.
    pub fn standard() -> Self {
        RootWindow {
            re_min: cst(-5.0),
            re_max: cst(1.0),
            im_max: cst(50.0),
        }
    }
}

impl<T: Real> Default for RootWindow<T> {
    fn default() -> Self {
        Self::standard()
    }
}

/// First pure-imaginary crossing of `lambda + a + b e^(-lambda tau) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfPoint<T> {
    /// Crossing frequency `w0 = sqrt(b^2 - a^2)`.
    pub omega: T,
    /// Smallest destabilizing delay `tau0 = arccos(-a/b) / w0`.
    pub tau0: T,
    /// Gap `2 pi / w0` between successive crossing delays.
    pub spacing: T,
    /// Period `2 pi / w0` of the emerging periodic solutions.
    pub period: T,
}

impl<T: Real> HopfPoint<T> {
    /// The k-th crossing delay `(arccos(-a/b) + 2 k pi) / w0`.
    pub fn crossing_delay(&self, k: usize) -> T {
        self.tau0 + self.spacing * cst(k as f64)
    }
}

/// Computes the Hopf crossing data for the scalar equation
/// `x'(t) + a x(t) + b x(t - tau) = 0`.
///
/// Requires `b > a >= 0`; then the rightmost root pair reaches the imaginary
/// axis at `tau0` with frequency `w0`, and again at every `tau0 + 2 k pi/w0`.
/// At `a = 0` the period equals `4 tau0` exactly.
pub fn hopf_point_scalar<T: Real>(a: T, b: T) -> Result<HopfPoint<T>> {
    if !(a >= T::zero()) || !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::NoPureImaginaryRoot {
            a: a.to_f64().unwrap_or(f64::NAN),
            b: b.to_f64().unwrap_or(f64::NAN),
        });
    }
    let omega = (b * b - a * a).sqrt();
    let tau0 = (-a / b).acos() / omega;
    let spacing = cst::<T>(2.0) * T::PI() / omega;
    Ok(HopfPoint {
        omega,
        tau0,
        spacing,
        period: spacing,
    })
}

/// Routh-Hurwitz verdict for `lambda^2 + p lambda + q`.
///
/// For quadratics the criterion is exact: both roots have negative real part
/// iff p > 0 and q > 0, so the failure direction genuinely proves instability.
/// Within `1e-12` of either axis the sign is not trusted and the verdict is
/// Unknown.
pub fn routh_hurwitz_2<T: Real>(p: T, q: T) -> Verdict {
    let (pf, qf) = (p.to_f64().unwrap_or(f64::NAN), q.to_f64().unwrap_or(f64::NAN));
    let tol = cst::<T>(1e-12);
    if p.abs() < tol || q.abs() < tol {
        return Verdict::unknown(format!(
            "routh-hurwitz-2: boundary case, |p| or |q| below 1e-12 (p = {pf:.3e}, q = {qf:.3e})"
        ));
    }
    if p > T::zero() && q > T::zero() {
        Verdict::proved(
            VerdictTag::LocallyStable,
            format!("routh-hurwitz-2: p = {pf:.6} > 0 and q = {qf:.6} > 0"),
        )
    } else {
        Verdict::proved(
            VerdictTag::Unstable,
            format!("routh-hurwitz-2: sign condition fails (p = {pf:.6}, q = {qf:.6})"),
        )
    }
}

/// Advisory flag: a delayed term of the same degree as the base makes the
/// equation neutral, and arbitrarily small delays can then destabilize it
/// (root chains approach a positive-real-part asymptote). Reported alongside
/// root computations, never instead of them.
pub fn neutral_destabilization_check<T: Real>(q: &QuasiPolynomial<T>) -> bool {
    let deg = q.base.degree();
    q.delayed.iter().any(|(_, p)| p.degree() == deg)
}

/// Linearizes `sys` at the steady state `x_star` and expands the
/// characteristic determinant `det(lambda I - A0 - sum_k Ak e^(-lambda tau_k))`
/// to a scalar quasi-polynomial. Jacobian blocks come from central finite
/// differences with step `1e-6 * max(1, |x*_j|)` per component, evaluated at
/// `t = 0`.
///
/// Only dimensions 1 and 2 are supported (determinant expansion); `x_star`
/// must zero the right-hand side to within `1e-8` in the max norm.
pub fn linearize_at<T: Real>(sys: &DelaySystem<T>, x_star: &[T]) -> Result<QuasiPolynomial<T>> {
    let dim = sys.dimension();
    if dim > 2 {
        return Err(Error::UnsupportedDimension {
            dim,
            what: "characteristic determinant expansion",
        });
    }
    if x_star.len() != dim {
        return Err(Error::invalid(format!(
            "steady state has dimension {}, system has {dim}",
            x_star.len()
        )));
    }
    let m = sys.delays().len();
    let delayed_star: Vec<Vec<T>> = vec![x_star.to_vec(); m];
    let mut rhs_val = vec![T::zero(); dim];
    sys.eval_rhs(T::zero(), x_star, &delayed_star, &mut rhs_val);
    let residual = rhs_val
        .iter()
        .fold(T::zero(), |acc, &v| acc.max(v.abs()));
    let tol = cst::<T>(1e-8);
    if !(residual < tol) {
        return Err(Error::NotSteadyState {
            residual: residual.to_f64().unwrap_or(f64::NAN),
            tol: 1e-8,
        });
    }

    // jac[0] = d f / d x(t); jac[1 + k] = d f / d x(t - tau_k).
    let mut jac: Vec<Vec<Vec<T>>> = vec![vec![vec![T::zero(); dim]; dim]; m + 1];
    let mut plus = vec![T::zero(); dim];
    let mut minus = vec![T::zero(); dim];
    for arg in 0..=m {
        for j in 0..dim {
            let delta = cst::<T>(1e-6) * x_star[j].abs().max(T::one());
            let mut x = x_star.to_vec();
            let mut delayed = delayed_star.clone();
            if arg == 0 {
                x[j] = x_star[j] + delta;
            } else {
                delayed[arg - 1][j] = x_star[j] + delta;
            }
            sys.eval_rhs(T::zero(), &x, &delayed, &mut plus);
            if arg == 0 {
                x[j] = x_star[j] - delta;
            } else {
                delayed[arg - 1][j] = x_star[j] - delta;
            }
            sys.eval_rhs(T::zero(), &x, &delayed, &mut minus);
            for i in 0..dim {
                jac[arg][i][j] = (plus[i] - minus[i]) / (delta + delta);
            }
        }
    }

    // Matrix entry (i, j) of lambda I - A0 - sum Ak e^(-lambda tau_k) as a
    // scalar quasi-polynomial.
    let entry = |i: usize, j: usize| -> QuasiPolynomial<T> {
        let base = if i == j {
            Poly::new(vec![-jac[0][i][j], T::one()])
        } else {
            Poly::new(vec![-jac[0][i][j]])
        };
        let terms = sys
            .delays()
            .iter()
            .enumerate()
            .map(|(k, &tau)| (tau, Poly::new(vec![-jac[k + 1][i][j]])))
            .collect();
        QuasiPolynomial::from_parts(base, terms)
    };

    let det = if dim == 1 {
        entry(0, 0)
    } else {
        entry(0, 0).mul(&entry(1, 1)).sub(&entry(0, 1).mul(&entry(1, 0)))
    };
    debug_assert!(det.base.degree() == dim);
    Ok(det)
}
