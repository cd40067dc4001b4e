//! Dense solution output: contiguous cubic segments with exact breakpoints.

use crate::error::{Error, Result};
use crate::scalar::{cst, Real};

/// One cubic dense-output segment on `[t_start, t_end]`.
///
/// `coeffs[i]` holds `[c0, c1, c2, c3]` for component `i` in the local
/// variable `theta = t - t_start`, so `c0` is the left endpoint value and
/// `c1` the left endpoint derivative.
#[derive(Debug, Clone)]
pub struct CubicSegment<T> {
    pub t_start: T,
    pub t_end: T,
    pub coeffs: Vec<[T; 4]>,
}

impl<T: Real> CubicSegment<T> {
    /// Evaluates component `comp` at local offset `theta`.
    #[inline]
    pub fn eval_component(&self, comp: usize, theta: T) -> T {
        let [c0, c1, c2, c3] = self.coeffs[comp];
        ((c3 * theta + c2) * theta + c1) * theta + c0
    }

    /// Derivative of component `comp` at local offset `theta`.
    #[inline]
    pub fn eval_derivative(&self, comp: usize, theta: T) -> T {
        let [_, c1, c2, c3] = self.coeffs[comp];
        (c3 * (theta + theta + theta) + c2 + c2) * theta + c1
    }

    pub fn width(&self) -> T {
        self.t_end - self.t_start
    }
}

/// Piecewise-cubic solution on `[t0, t_end]` produced by the integrator.
///
/// Segments tile the interval contiguously; the breakpoint ladder used during
/// integration is retained so downstream analyses can align with derivative
/// discontinuities.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    t0: T,
    t_end: T,
    dimension: usize,
    breakpoints: Vec<T>,
    segments: Vec<CubicSegment<T>>,
}

impl<T: Real> Trajectory<T> {
    /// Assembles a trajectory from contiguous segments.
    pub fn new(segments: Vec<CubicSegment<T>>, breakpoints: Vec<T>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("trajectory needs at least one segment"));
        }
        let dimension = segments[0].coeffs.len();
        if dimension == 0 {
            return Err(Error::invalid("trajectory segments need components"));
        }
        for (idx, seg) in segments.iter().enumerate() {
            if seg.coeffs.len() != dimension {
                return Err(Error::invalid(format!(
                    "segment {idx} dimension {} != {dimension}",
                    seg.coeffs.len()
                )));
            }
            if !(seg.t_start < seg.t_end) {
                return Err(Error::invalid(format!("segment {idx} has t_start >= t_end")));
            }
            if idx > 0 {
                let prev = segments[idx - 1].t_end;
                if (seg.t_start - prev).abs() > cst::<T>(1e-12) * prev.abs().max(T::one()) {
                    return Err(Error::invalid(format!(
                        "segments {} and {idx} do not tile contiguously",
                        idx - 1
                    )));
                }
            }
        }
        let t0 = segments[0].t_start;
        let t_end = segments.last().unwrap().t_end;
        Ok(Trajectory {
            t0,
            t_end,
            dimension,
            breakpoints,
            segments,
        })
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn t_end(&self) -> T {
        self.t_end
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Breakpoint ladder (derivative-discontinuity times) used when stepping.
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[CubicSegment<T>] {
        &self.segments
    }

    /// Index of the segment containing `t` (clamped to the span ends).
    pub fn locate(&self, t: T) -> usize {
        self.segments
            .partition_point(|s| s.t_start <= t)
            .saturating_sub(1)
    }

    /// Evaluates all components at `t` into `out`.
    ///
    /// Accepts a relative slack of `1e-9` beyond either end (rounding in
    /// delayed-argument arithmetic); further out is a domain error.
    pub fn eval_into(&self, t: T, out: &mut [T]) -> Result<()> {
        assert_eq!(out.len(), self.dimension, "output buffer dimension");
        let seg = self.segment_for(t)?;
        let theta = (t - seg.t_start).max(T::zero()).min(seg.width());
        for (comp, o) in out.iter_mut().enumerate() {
            *o = seg.eval_component(comp, theta);
        }
        Ok(())
    }

    /// Evaluates all components at `t` into a fresh vector.
    pub fn eval(&self, t: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.dimension];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// Evaluates a single component at `t`.
    pub fn eval_component(&self, comp: usize, t: T) -> Result<T> {
        if comp >= self.dimension {
            return Err(Error::invalid(format!(
                "component {comp} out of range for dimension {}",
                self.dimension
            )));
        }
        let seg = self.segment_for(t)?;
        let theta = (t - seg.t_start).max(T::zero()).min(seg.width());
        Ok(seg.eval_component(comp, theta))
    }

    /// Derivative of a single component at `t`.
    pub fn eval_derivative(&self, comp: usize, t: T) -> Result<T> {
        if comp >= self.dimension {
            return Err(Error::invalid(format!(
                "component {comp} out of range for dimension {}",
                self.dimension
            )));
        }
        let seg = self.segment_for(t)?;
        let theta = (t - seg.t_start).max(T::zero()).min(seg.width());
        Ok(seg.eval_derivative(comp, theta))
    }

    fn segment_for(&self, t: T) -> Result<&CubicSegment<T>> {
        let slack = cst::<T>(1e-9) * t.abs().max(T::one());
        if t < self.t0 - slack || t > self.t_end + slack {
            return Err(Error::OutOfDomain {
                what: "trajectory",
                t: t.to_f64().unwrap_or(f64::NAN),
                lo: self.t0.to_f64().unwrap_or(f64::NAN),
                hi: self.t_end.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(&self.segments[self.locate(t)])
    }
}
