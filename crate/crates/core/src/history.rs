//! Piecewise-polynomial history functions.
//!
//! A [`HistoryFunction`] prescribes the state on an interval `[span_start, 0]`
//! preceding the integration origin. Pieces are polynomials of degree at most
//! [`MAX_DEGREE`] in the global time variable, stored in ascending powers.

use crate::error::{Error, Result};
use crate::scalar::{cst, Real};

/// Highest polynomial degree a history piece may have.
pub const MAX_DEGREE: usize = 3;

/// One polynomial piece of a history function on `[start, end]`.
///
/// `coeffs[i][k]` multiplies `t^k` in component `i`; all components share the
/// time interval.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryPiece<T> {
    pub start: T,
    pub end: T,
    pub coeffs: Vec<Vec<T>>,
}

/// Initial datum on `[span_start, 0]`, evaluable at any point of its span.
///
/// Invariants (enforced at construction): pieces tile the span contiguously in
/// ascending time, every piece has the same dimension, degrees are at most
/// [`MAX_DEGREE`], and the last piece ends at 0 (within `1e-12` of it; the
/// endpoint is snapped exactly).
#[derive(Debug, Clone)]
pub struct HistoryFunction<T> {
    span_start: T,
    dimension: usize,
    pieces: Vec<HistoryPiece<T>>,
}

impl<T: Real> HistoryFunction<T> {
    /// Builds a history from polynomial pieces, validating the tiling.
    pub fn new(mut pieces: Vec<HistoryPiece<T>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("history needs at least one piece"));
        }
        let dimension = pieces[0].coeffs.len();
        if dimension == 0 {
            return Err(Error::invalid("history pieces need at least one component"));
        }
        let single = pieces.len() == 1;
        for (idx, piece) in pieces.iter().enumerate() {
            if piece.coeffs.len() != dimension {
                return Err(Error::invalid(format!(
                    "history piece {idx} has dimension {} but piece 0 has {dimension}",
                    piece.coeffs.len()
                )));
            }
            for comp in &piece.coeffs {
                if comp.is_empty() || comp.len() > MAX_DEGREE + 1 {
                    return Err(Error::invalid(format!(
                        "history piece {idx} must have 1..={} coefficients per component",
                        MAX_DEGREE + 1
                    )));
                }
                if comp.iter().any(|c| !c.is_finite()) {
                    return Err(Error::invalid(format!(
                        "history piece {idx} has a non-finite coefficient"
                    )));
                }
            }
            if !piece.start.is_finite() || !piece.end.is_finite() {
                return Err(Error::invalid(format!(
                    "history piece {idx} has a non-finite endpoint"
                )));
            }
            // A zero-length piece is only meaningful as a pure initial value.
            let ok_span = if single {
                piece.start <= piece.end
            } else {
                piece.start < piece.end
            };
            if !ok_span {
                return Err(Error::invalid(format!(
                    "history piece {idx} has start >= end"
                )));
            }
        }
        // Snap adjacent endpoints together and the final endpoint to zero.
        for i in 1..pieces.len() {
            let prev_end = pieces[i - 1].end;
            let gap = (pieces[i].start - prev_end).abs();
            if gap > snap_tol(prev_end) {
                return Err(Error::invalid(format!(
                    "history pieces {} and {} do not tile contiguously",
                    i - 1,
                    i
                )));
            }
            pieces[i].start = prev_end;
        }
        let last_end = pieces.last().unwrap().end;
        if last_end.abs() > snap_tol(T::one()) {
            return Err(Error::invalid("history must end at t = 0"));
        }
        pieces.last_mut().unwrap().end = T::zero();
        if single && pieces[0].start > pieces[0].end {
            pieces[0].start = T::zero();
        }
        let span_start = pieces[0].start;
        Ok(HistoryFunction {
            span_start,
            dimension,
            pieces,
        })
    }

    /// Constant history with the given value on `[span_start, 0]`.
    ///
    /// `span_start = 0` yields a degenerate single-point history, the natural
    /// initial datum for an ordinary (delay-free) system.
    pub fn constant(span_start: T, values: &[T]) -> Result<Self> {
        let coeffs = values.iter().map(|&v| vec![v]).collect();
        HistoryFunction::new(vec![HistoryPiece {
            start: span_start,
            end: T::zero(),
            coeffs,
        }])
    }

    /// Single-piece polynomial history on `[span_start, 0]`.
    ///
    /// `coeffs[i][k]` multiplies `t^k` in component `i` (global time).
    pub fn polynomial(span_start: T, coeffs: Vec<Vec<T>>) -> Result<Self> {
        HistoryFunction::new(vec![HistoryPiece {
            start: span_start,
            end: T::zero(),
            coeffs,
        }])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn span_start(&self) -> T {
        self.span_start
    }

    pub fn pieces(&self) -> &[HistoryPiece<T>] {
        &self.pieces
    }

    /// Evaluates the history at `t`, writing all components into `out`.
    ///
    /// `t` may overshoot either end of `[span_start, 0]` by a relative slack
    /// of `1e-9` (rounding in delayed-argument arithmetic); anything further
    /// out is a domain error.
    pub fn eval_into(&self, t: T, out: &mut [T]) -> Result<()> {
        assert_eq!(out.len(), self.dimension, "output buffer dimension");
        let slack = eval_slack(self.span_start);
        if t < self.span_start - slack || t > slack {
            return Err(Error::OutOfDomain {
                what: "history",
                t: t.to_f64().unwrap_or(f64::NAN),
                lo: self.span_start.to_f64().unwrap_or(f64::NAN),
                hi: 0.0,
            });
        }
        let t = clamp(t, self.span_start, T::zero());
        // Last piece whose start is <= t; starts ascend, so binary search.
        let idx = self
            .pieces
            .partition_point(|p| p.start <= t)
            .saturating_sub(1);
        let piece = &self.pieces[idx];
        for (o, comp) in out.iter_mut().zip(&piece.coeffs) {
            *o = horner(comp, t);
        }
        Ok(())
    }

    /// Evaluates the history at `t` into a fresh vector.
    pub fn eval(&self, t: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.dimension];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// State at the integration origin `t = 0`.
    pub fn value_at_zero(&self) -> Vec<T> {
        self.eval(T::zero()).expect("0 is always in the history span")
    }
}

fn snap_tol<T: Real>(reference: T) -> T {
    cst::<T>(1e-12) * reference.abs().max(T::one())
}

fn eval_slack<T: Real>(span_start: T) -> T {
    cst::<T>(1e-9) * span_start.abs().max(T::one())
}

fn clamp<T: Real>(t: T, lo: T, hi: T) -> T {
    t.max(lo).min(hi)
}

/// Evaluates a polynomial given in ascending powers.
pub(crate) fn horner<T: Real>(coeffs: &[T], x: T) -> T {
    let mut acc = T::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}
