//! Root counting and location by the argument principle.
//!
//! The count of zeros inside a rectangle equals the winding number of
//! `D(lambda)` around the boundary. Rectangles are bisected until each holds
//! a single root (or a tight multiple-root cluster), which Newton iteration
//! then polishes using the analytic derivative.

use num_complex::Complex;

use super::{neutral_destabilization_check, QuasiPolynomial, RootWindow};
use crate::error::{Error, Result};
use crate::scalar::{cst, Real};
use crate::verdict::{Verdict, VerdictTag};

const NEWTON_ITERS: usize = 100;
/// Boxes at most this wide are treated as one (possibly multiple) root site.
const CLUSTER_DIAMETER: f64 = 1e-7;
/// Edge-refinement recursion cap; exceeding it means a root sits too close to
/// the contour to resolve.
const MAX_EDGE_DEPTH: usize = 42;
const MAX_SPLIT_DEPTH: usize = 90;

#[derive(Debug, Clone, Copy)]
struct Rect<T> {
    re_lo: T,
    re_hi: T,
    im_lo: T,
    im_hi: T,
}

impl<T: Real> Rect<T> {
    fn width(&self) -> T {
        self.re_hi - self.re_lo
    }

    fn height(&self) -> T {
        self.im_hi - self.im_lo
    }

    fn diameter(&self) -> T {
        self.width().max(self.height())
    }

    fn center(&self) -> Complex<T> {
        let half = cst::<T>(0.5);
        Complex::new(
            (self.re_lo + self.re_hi) * half,
            (self.im_lo + self.im_hi) * half,
        )
    }

    fn corners(&self) -> [Complex<T>; 4] {
        [
            Complex::new(self.re_lo, self.im_lo),
            Complex::new(self.re_hi, self.im_lo),
            Complex::new(self.re_hi, self.im_hi),
            Complex::new(self.re_lo, self.im_hi),
        ]
    }

    fn grow(&self, amount: T) -> Rect<T> {
        Rect {
            re_lo: self.re_lo - amount,
            re_hi: self.re_hi + amount,
            im_lo: self.im_lo - amount,
            im_hi: self.im_hi + amount,
        }
    }

    fn contains(&self, z: Complex<T>, slack: T) -> bool {
        z.re >= self.re_lo - slack
            && z.re <= self.re_hi + slack
            && z.im >= self.im_lo - slack
            && z.im <= self.im_hi + slack
    }
}

/// Proximity tolerance: `|D|` below this near a contour point means a root is
/// effectively on the contour. Relative to the local term magnitude so large
/// windows (|lambda| in the hundreds) are handled consistently.
fn boundary_tol<T: Real>(q: &QuasiPolynomial<T>, z: Complex<T>) -> T {
    cst::<T>(1e-8) * q.term_scale(z).max(T::one())
}

fn eval_checked<T: Real>(
    q: &QuasiPolynomial<T>,
    z: Complex<T>,
    side: &'static str,
) -> Result<Complex<T>> {
    let d = q.eval(z);
    if d.norm() < boundary_tol(q, z) {
        return Err(Error::BoundaryRoot { where_: side });
    }
    Ok(d)
}

/// Total argument change of `D` along the segment `[z0, z1]`, by adaptive
/// sampling refined until consecutive samples rotate by less than pi/2.
fn edge_arg_change<T: Real>(
    q: &QuasiPolynomial<T>,
    z0: Complex<T>,
    z1: Complex<T>,
    side: &'static str,
) -> Result<T> {
    // The exponential factors rotate at rate tau * |d Im|; the polynomial part
    // contributes at most about deg * pi along a straight segment. Budget a
    // quarter-turn per initial subsample.
    let d_im = (z1.im - z0.im).abs();
    let budget = cst::<T>(q.degree() as f64) * T::PI() + q.total_delay() * d_im + T::one();
    let n0 = (budget / T::FRAC_PI_4())
        .ceil()
        .to_usize()
        .unwrap_or(4096)
        .clamp(8, 4096);
    let step = (z1 - z0) / cst::<T>(n0 as f64);
    let mut total = T::zero();
    let mut prev_z = z0;
    let mut prev_d = eval_checked(q, z0, side)?;
    for k in 1..=n0 {
        let z = if k == n0 {
            z1
        } else {
            z0 + step * cst::<T>(k as f64)
        };
        let d = eval_checked(q, z, side)?;
        total += refine_arg(q, prev_z, prev_d, z, d, 0, side)?;
        prev_z = z;
        prev_d = d;
    }
    Ok(total)
}

/// Rotation from `d0` to `d1` in `(-pi, pi]`. Computed as a wrapped
/// difference of arguments, not `(d1 / d0).arg()`: the division squares
/// magnitudes, which overflows once `|D|` passes ~1e154 (routine on window
/// edges where `Re z * total_delay` is a few hundred).
fn rotation<T: Real>(d0: Complex<T>, d1: Complex<T>) -> T {
    let two_pi = cst::<T>(2.0) * T::PI();
    let mut dphi = d1.arg() - d0.arg();
    if dphi > T::PI() {
        dphi -= two_pi;
    } else if dphi <= -T::PI() {
        dphi += two_pi;
    }
    dphi
}

fn refine_arg<T: Real>(
    q: &QuasiPolynomial<T>,
    z0: Complex<T>,
    d0: Complex<T>,
    z1: Complex<T>,
    d1: Complex<T>,
    depth: usize,
    side: &'static str,
) -> Result<T> {
    let dphi = rotation(d0, d1);
    // Accept only past depth 1: the mandatory split gives every initial
    // sub-segment a checked midpoint, shrinking the blind spot for roots
    // lurking between samples.
    if depth >= 1 && dphi.abs() < T::FRAC_PI_2() {
        return Ok(dphi);
    }
    if depth >= MAX_EDGE_DEPTH {
        return Err(Error::BoundaryRoot { where_: side });
    }
    let zm = (z0 + z1) * cst::<T>(0.5);
    let dm = eval_checked(q, zm, side)?;
    Ok(refine_arg(q, z0, d0, zm, dm, depth + 1, side)?
        + refine_arg(q, zm, dm, z1, d1, depth + 1, side)?)
}

/// Number of roots (with multiplicity) strictly inside `rect`.
fn winding<T: Real>(q: &QuasiPolynomial<T>, rect: &Rect<T>) -> Result<usize> {
    let c = rect.corners();
    let sides = ["bottom edge", "right edge", "top edge", "left edge"];
    let mut total = T::zero();
    for i in 0..4 {
        total += edge_arg_change(q, c[i], c[(i + 1) % 4], sides[i])?;
    }
    let turns = total / (cst::<T>(2.0) * T::PI());
    let count = turns.round();
    if (turns - count).abs() > cst(0.25) || count < -cst::<T>(0.25) {
        return Err(Error::BoundaryRoot {
            where_: "contour (inconsistent winding sum)",
        });
    }
    Ok(count.to_usize().unwrap_or(0))
}

/// Newton refinement from `seed`, constrained to stay near `rect`.
fn newton<T: Real>(q: &QuasiPolynomial<T>, seed: Complex<T>, rect: &Rect<T>) -> Result<Complex<T>> {
    let escape = rect.diameter() * cst::<T>(4.0) + T::one();
    let center = rect.center();
    let mut z = seed;
    for _ in 0..NEWTON_ITERS {
        let (d, dp) = q.eval_with_derivative(z);
        let scale = q.term_scale(z).max(T::one());
        if d.norm() <= cst::<T>(1e-12) * scale {
            return Ok(z);
        }
        if dp.norm() <= cst::<T>(1e-300) * scale {
            // Stationary point of D; nudge off it.
            z += Complex::new(rect.diameter(), rect.diameter()) * cst::<T>(1e-3);
            continue;
        }
        // Divide through by the local term scale first: the complex division
        // squares magnitudes, which overflows for very large |D|.
        z -= (d / scale) / (dp / scale);
        if (z - center).norm() > escape {
            return Err(Error::NoConvergence {
                what: "Newton refinement of a characteristic root",
                iterations: NEWTON_ITERS,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "Newton refinement of a characteristic root",
        iterations: NEWTON_ITERS,
    })
}

/// Recursively bisects `rect` (which holds `count` roots) until single roots
/// can be polished, appending results to `roots`.
fn locate<T: Real>(
    q: &QuasiPolynomial<T>,
    rect: &Rect<T>,
    count: usize,
    roots: &mut Vec<Complex<T>>,
    depth: usize,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if depth > MAX_SPLIT_DEPTH {
        return Err(Error::NoConvergence {
            what: "rectangle bisection",
            iterations: MAX_SPLIT_DEPTH,
        });
    }
    let tiny = rect.diameter() <= cst(CLUSTER_DIAMETER);
    if count == 1 || tiny {
        // The slack must stay far smaller than the box: Newton escaping to a
        // root in a sibling box has to be rejected, not adopted.
        let slack = rect.diameter() * cst::<T>(1e-3) + cst::<T>(1e-9);
        match newton(q, rect.center(), rect) {
            Ok(z) if rect.contains(z, slack) => {
                for _ in 0..count {
                    roots.push(z);
                }
                return Ok(());
            }
            Ok(_) | Err(_) if !tiny => {
                // Fell toward a root outside, or diverged: shrink the box.
                return split(q, rect, count, roots, depth);
            }
            Ok(z) => {
                // Cluster-sized box; accept the converged point even if it
                // sits a hair outside.
                for _ in 0..count {
                    roots.push(z);
                }
                return Ok(());
            }
            Err(e) => return Err(e),
        }
    }
    split(q, rect, count, roots, depth)
}

fn split<T: Real>(
    q: &QuasiPolynomial<T>,
    rect: &Rect<T>,
    count: usize,
    roots: &mut Vec<Complex<T>>,
    depth: usize,
) -> Result<()> {
    let vertical_line = rect.width() >= rect.height();
    // Candidate split positions as fractions of the split axis; jittered so a
    // root sitting exactly at the midline can be avoided.
    let fractions = [0.5, 0.53, 0.47, 0.57, 0.43, 0.61, 0.39];
    let mut last_err = Error::BoundaryRoot {
        where_: "interior split line",
    };
    for &frac in &fractions {
        let f = cst::<T>(frac);
        let (a, b) = if vertical_line {
            let x = rect.re_lo + rect.width() * f;
            if !split_line_clear(q, Complex::new(x, rect.im_lo), Complex::new(x, rect.im_hi)) {
                continue;
            }
            (
                Rect {
                    re_hi: x,
                    ..*rect
                },
                Rect {
                    re_lo: x,
                    ..*rect
                },
            )
        } else {
            let y = rect.im_lo + rect.height() * f;
            if !split_line_clear(q, Complex::new(rect.re_lo, y), Complex::new(rect.re_hi, y)) {
                continue;
            }
            (
                Rect {
                    im_hi: y,
                    ..*rect
                },
                Rect {
                    im_lo: y,
                    ..*rect
                },
            )
        };
        let ca = match winding(q, &a) {
            Ok(c) => c,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        let cb = match winding(q, &b) {
            Ok(c) => c,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        if ca + cb != count {
            // A root too close to the split line confused one contour; try
            // another offset.
            last_err = Error::BoundaryRoot {
                where_: "interior split line (count mismatch)",
            };
            continue;
        }
        locate(q, &a, ca, roots, depth + 1)?;
        locate(q, &b, cb, roots, depth + 1)?;
        return Ok(());
    }
    // Every offset failed. For a multiple root (or a very tight cluster) this
    // is expected: once the box shrinks to radius r, |D| ~ r^m on its contour
    // drops below the proximity tolerance and no further bisection is
    // possible. Resolve the box by Newton from several seeds instead.
    if rect.diameter() <= cst(1e-2) {
        if let Some(()) = resolve_cluster(q, rect, count, roots) {
            return Ok(());
        }
    }
    Err(last_err)
}

/// Final fallback for a small box holding `count` roots that can no longer be
/// bisected: polish from a spread of seeds and match the located distinct
/// roots to the known count. Coincident (multiple) roots come back as one
/// site carrying the remaining multiplicity.
fn resolve_cluster<T: Real>(
    q: &QuasiPolynomial<T>,
    rect: &Rect<T>,
    count: usize,
    roots: &mut Vec<Complex<T>>,
) -> Option<()> {
    let c = rect.center();
    let w = rect.width() * cst::<T>(0.3);
    let h = rect.height() * cst::<T>(0.3);
    let seeds = [
        c,
        c + Complex::new(w, T::zero()),
        c - Complex::new(w, T::zero()),
        c + Complex::new(T::zero(), h),
        c - Complex::new(T::zero(), h),
        c + Complex::new(w, h),
        c - Complex::new(w, h),
        c + Complex::new(w, -h),
        c + Complex::new(-w, h),
    ];
    let slack = rect.diameter() * cst::<T>(1e-3) + cst::<T>(1e-9);
    let mut found: Vec<Complex<T>> = Vec::new();
    for seed in seeds {
        let Ok(z) = newton(q, seed, rect) else {
            continue;
        };
        if !rect.contains(z, slack) {
            continue;
        }
        let dup_tol = cst::<T>(1e-8) * (T::one() + z.norm());
        if found.iter().all(|f| (*f - z).norm() > dup_tol) {
            found.push(z);
        }
        if found.len() == count {
            break;
        }
    }
    if found.is_empty() {
        return None;
    }
    found.truncate(count);
    // Leftover multiplicity sits on the site nearest the box center.
    found.sort_by(|a, b| {
        (*a - c)
            .norm()
            .partial_cmp(&(*b - c).norm())
            .unwrap()
    });
    for (i, z) in found.iter().enumerate() {
        let copies = if i == 0 {
            count - (found.len() - 1)
        } else {
            1
        };
        for _ in 0..copies {
            roots.push(*z);
        }
    }
    Some(())
}

/// True when `|D|` stays comfortably above the boundary tolerance along the
/// candidate split segment.
fn split_line_clear<T: Real>(q: &QuasiPolynomial<T>, z0: Complex<T>, z1: Complex<T>) -> bool {
    let n = 33;
    let step = (z1 - z0) / cst::<T>(n as f64);
    for k in 0..=n {
        let z = z0 + step * cst::<T>(k as f64);
        if q.eval(z).norm() < boundary_tol(q, z) * cst(10.0) {
            return false;
        }
    }
    true
}

/// Snaps near-real roots onto the axis and averages conjugate partners so
/// returned lists are exactly symmetric; sorts by (Re, Im).
fn symmetrize<T: Real>(roots: &mut [Complex<T>]) {
    for z in roots.iter_mut() {
        if z.im.abs() <= cst::<T>(1e-9) * (T::one() + z.re.abs()) {
            z.im = T::zero();
        }
    }
    let n = roots.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] || roots[i].im <= T::zero() {
            continue;
        }
        let target = roots[i].conj();
        let tol = cst::<T>(1e-6) * (T::one() + roots[i].norm());
        let mut best: Option<(usize, T)> = None;
        for (j, r) in roots.iter().enumerate() {
            if paired[j] || j == i || r.im >= T::zero() {
                continue;
            }
            let dist = (*r - target).norm();
            if dist < tol && best.map_or(true, |(_, d)| dist < d) {
                best = Some((j, dist));
            }
        }
        if let Some((j, _)) = best {
            let re = (roots[i].re + roots[j].re) * cst::<T>(0.5);
            let im = (roots[i].im - roots[j].im) * cst::<T>(0.5);
            roots[i] = Complex::new(re, im);
            roots[j] = Complex::new(re, -im);
            paired[i] = true;
            paired[j] = true;
        }
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

fn window_rect<T: Real>(w: &RootWindow<T>) -> Rect<T> {
    Rect {
        re_lo: w.re_min,
        re_hi: w.re_max,
        im_lo: -w.im_max,
        im_hi: w.im_max,
    }
}

/// Locates every root of `q` inside the window (multiplicity by repetition),
/// sorted by real part then imaginary part, in conjugate-symmetric pairs.
///
/// If a root sits on (or hugs) the window boundary, the window is grown once
/// by `1e-6` and the search retried before the proximity error is surfaced.
pub fn roots_in_rectangle<T: Real>(
    q: &QuasiPolynomial<T>,
    w: &RootWindow<T>,
) -> Result<Vec<Complex<T>>> {
    w.validate()?;
    let rect = window_rect(w);
    let mut roots = match collect(q, &rect) {
        Ok(r) => r,
        Err(Error::BoundaryRoot { .. }) => collect(q, &rect.grow(cst(1e-6)))?,
        Err(e) => return Err(e),
    };
    symmetrize(&mut roots);
    Ok(roots)
}

fn collect<T: Real>(q: &QuasiPolynomial<T>, rect: &Rect<T>) -> Result<Vec<Complex<T>>> {
    let count = winding(q, rect)?;
    let mut roots = Vec::with_capacity(count);
    locate(q, rect, count, &mut roots, 0)?;
    Ok(roots)
}

/// Everything `rightmost_root` learned about the window.
#[derive(Debug, Clone)]
pub struct RightmostReport<T> {
    /// All located roots, conjugate-symmetric, sorted by (Re, Im).
    pub roots: Vec<Complex<T>>,
    /// Largest real part over `roots`.
    pub max_re: T,
    /// Roots within `1e-9` of `max_re`, largest |Im| first.
    pub rightmost: Vec<Complex<T>>,
    /// No sign of roots to the right of the window: the sentinel strip
    /// `[re_max, re_max + 1]` counted zero roots and the equation is not
    /// neutral. Neutral equations carry root chains with unbounded imaginary
    /// parts, so no finite strip can clear them.
    pub right_edge_clear: bool,
    /// Advisory: a delayed term matches the base degree (neutral equation).
    pub neutral: bool,
    /// Stability reading of `max_re` (numeric evidence, window-relative).
    pub verdict: Verdict,
}

/// Finds the root(s) of maximal real part inside the window.
///
/// An empty window is an error (`NoRootsInWindow`): the caller should widen
/// the search rather than read absence as stability.
pub fn rightmost_root<T: Real>(
    q: &QuasiPolynomial<T>,
    w: &RootWindow<T>,
) -> Result<RightmostReport<T>> {
    let roots = roots_in_rectangle(q, w)?;
    if roots.is_empty() {
        return Err(Error::NoRootsInWindow);
    }
    let max_re = roots
        .iter()
        .fold(T::neg_infinity(), |acc, z| acc.max(z.re));
    let mut rightmost: Vec<Complex<T>> = roots
        .iter()
        .copied()
        .filter(|z| z.re >= max_re - cst(1e-9))
        .collect();
    rightmost.sort_by(|a, b| {
        b.im.abs()
            .partial_cmp(&a.im.abs())
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    let neutral = neutral_destabilization_check(q);
    let strip = Rect {
        re_lo: w.re_max,
        re_hi: w.re_max + T::one(),
        im_lo: -w.im_max,
        im_hi: w.im_max,
    };
    let right_edge_clear = !neutral && matches!(winding(q, &strip), Ok(0));

    let max_re_f = max_re.to_f64().unwrap_or(f64::NAN);
    let verdict = if max_re > cst(1e-9) {
        Verdict::numeric(
            VerdictTag::Unstable,
            format!("rightmost-root: Re lambda = {max_re_f:.6e} > 0 inside the window"),
        )
    } else if max_re < -cst::<T>(1e-9) {
        if w.re_max >= cst(0.5) {
            Verdict::numeric(
                VerdictTag::LocallyStable,
                format!(
                    "rightmost-root: max Re lambda = {max_re_f:.6e} < 0 with window extending to re_max >= 0.5"
                ),
            )
        } else {
            Verdict::unknown(format!(
                "rightmost-root: max Re lambda = {max_re_f:.6e} but the window right edge sits below 0.5"
            ))
        }
    } else {
        Verdict::unknown(format!(
            "rightmost-root: max Re lambda = {max_re_f:.6e} within 1e-9 of the imaginary axis"
        ))
    };

    Ok(RightmostReport {
        roots,
        max_re,
        rightmost,
        right_edge_clear,
        neutral,
        verdict,
    })
}
