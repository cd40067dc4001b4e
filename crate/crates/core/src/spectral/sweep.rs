//! Delay sweeps: track the rightmost characteristic root across a delay range
//! and bracket the points where stability flips.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::{rightmost_root, QuasiPolynomial, RightmostReport, RootWindow};
use crate::error::{Error, Result};
use crate::scalar::{cst, Real};

/// Which way stability flips as the delay increases through the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchDirection {
    /// Rightmost root crosses into the right half-plane.
    Destabilizing,
    /// Rightmost root retreats into the left half-plane.
    Stabilizing,
}

impl std::fmt::Display for SwitchDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SwitchDirection::Destabilizing => "destabilizing",
            SwitchDirection::Stabilizing => "stabilizing",
        })
    }
}

/// A stability switch bracketed to `|delta tau| < 1e-6`.
#[derive(Debug, Clone, Copy)]
pub struct SwitchEvent<T> {
    pub tau_star: T,
    pub direction: SwitchDirection,
    /// |Im| of the leading root just on the unstable side: the angular
    /// frequency of the oscillation born (or dying) at the switch.
    pub crossing_frequency: T,
}

/// One grid point of the sweep; `sigma` is the max real part of the
/// characteristic roots in the window, `None` where evaluation failed.
#[derive(Debug, Clone, Copy)]
pub struct ScanSample<T> {
    pub tau: T,
    pub sigma: Option<T>,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome<T> {
    pub events: Vec<SwitchEvent<T>>,
    pub samples: Vec<ScanSample<T>>,
    /// Human-readable notes for grid points or refinements that failed and
    /// were skipped.
    pub warnings: Vec<String>,
}

fn thread_count(jobs: usize) -> usize {
    let requested = std::env::var("DELAYLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1);
    let n = requested.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
    });
    n.min(8).min(jobs.max(1))
}

fn sigma_at<T, F>(builder: &F, tau: T, window: &RootWindow<T>) -> Result<RightmostReport<T>>
where
    T: Real,
    F: Fn(T) -> Result<QuasiPolynomial<T>> + Sync,
{
    rightmost_root(&builder(tau)?, window)
}

/// Scans `sigma(tau) = max Re lambda` over `grid` evenly spaced delays in
/// `[tau_min, tau_max]` and bisects every strict sign change down to a width
/// of `1e-6`. Grid points are evaluated in parallel (`DELAYLAB_THREADS`
/// overrides the worker count). A failed grid point yields a warning and a
/// `None` sample, and no event is sought across it; a sample that lands
/// exactly on zero is not counted as a crossing.
pub fn stability_switch_scan<T, F>(
    builder: F,
    tau_min: T,
    tau_max: T,
    grid: usize,
    window: &RootWindow<T>,
) -> Result<ScanOutcome<T>>
where
    T: Real,
    F: Fn(T) -> Result<QuasiPolynomial<T>> + Sync,
{
    if !(tau_min.is_finite() && tau_max.is_finite()) || tau_min >= tau_max {
        return Err(Error::invalid(format!(
            "delay sweep needs a finite range with tau_min < tau_max, got [{tau_min}, {tau_max}]"
        )));
    }
    if grid < 2 {
        return Err(Error::invalid(format!(
            "delay sweep needs at least 2 grid points, got {grid}"
        )));
    }
    window.validate()?;

    let span = tau_max - tau_min;
    let denom = cst::<T>((grid - 1) as f64);
    let taus: Vec<T> = (0..grid)
        .map(|i| {
            if i == grid - 1 {
                tau_max
            } else {
                tau_min + span * cst::<T>(i as f64) / denom
            }
        })
        .collect();

    // Parallel grid pass: a shared cursor hands out indices, results land in a
    // slot table so ordering is preserved.
    let cursor = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RightmostReport<T>>>>> =
        Mutex::new((0..grid).map(|_| None).collect());
    let workers = thread_count(grid);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= grid {
                    break;
                }
                let out = sigma_at(&builder, taus[i], window);
                slots.lock().unwrap()[i] = Some(out);
            });
        }
    });
    let results = slots.into_inner().unwrap();

    let mut samples = Vec::with_capacity(grid);
    let mut warnings = Vec::new();
    let mut reports: Vec<Option<RightmostReport<T>>> = Vec::with_capacity(grid);
    for (tau, slot) in taus.iter().zip(results) {
        match slot.expect("every grid index was claimed by a worker") {
            Ok(rep) => {
                samples.push(ScanSample {
                    tau: *tau,
                    sigma: Some(rep.max_re),
                });
                reports.push(Some(rep));
            }
            Err(e) => {
                warnings.push(format!("tau = {tau}: {e}; grid point skipped"));
                samples.push(ScanSample {
                    tau: *tau,
                    sigma: None,
                });
                reports.push(None);
            }
        }
    }

    let mut events = Vec::new();
    for i in 0..grid - 1 {
        let (Some(lo), Some(hi)) = (&reports[i], &reports[i + 1]) else {
            continue;
        };
        let (s_lo, s_hi) = (lo.max_re, hi.max_re);
        let crossing = (s_lo < T::zero() && s_hi > T::zero())
            || (s_lo > T::zero() && s_hi < T::zero());
        if !crossing {
            continue;
        }
        let event = bisect_switch(
            &builder,
            window,
            (taus[i], lo.clone()),
            (taus[i + 1], hi.clone()),
            &mut warnings,
        );
        events.push(event);
    }

    Ok(ScanOutcome {
        events,
        samples,
        warnings,
    })
}

/// Shrinks a sign-change bracket to width `< 1e-6`. A failed midpoint
/// evaluation stops refinement early with a warning; the event is still
/// reported from the bracket reached so far.
fn bisect_switch<T, F>(
    builder: &F,
    window: &RootWindow<T>,
    mut lo: (T, RightmostReport<T>),
    mut hi: (T, RightmostReport<T>),
    warnings: &mut Vec<String>,
) -> SwitchEvent<T>
where
    T: Real,
    F: Fn(T) -> Result<QuasiPolynomial<T>> + Sync,
{
    let tol = cst::<T>(1e-6);
    let half = cst::<T>(0.5);
    while hi.0 - lo.0 >= tol {
        let mid = (lo.0 + hi.0) * half;
        match sigma_at(builder, mid, window) {
            Ok(rep) => {
                if (rep.max_re > T::zero()) == (hi.1.max_re > T::zero()) {
                    hi = (mid, rep);
                } else {
                    lo = (mid, rep);
                }
            }
            Err(e) => {
                warnings.push(format!(
                    "tau = {mid}: {e}; switch refinement stopped at bracket width {}",
                    hi.0 - lo.0
                ));
                break;
            }
        }
    }
    let direction = if lo.1.max_re < T::zero() {
        SwitchDirection::Destabilizing
    } else {
        SwitchDirection::Stabilizing
    };
    let unstable_side = if lo.1.max_re > T::zero() { &lo.1 } else { &hi.1 };
    SwitchEvent {
        tau_star: (lo.0 + hi.0) * half,
        direction,
        crossing_frequency: unstable_side.rightmost[0].im.abs(),
    }
}
