//! delaylab: delay differential equations by the method of steps, with
//! spectral and criterion-based stability analysis.

pub mod chaintrick;
pub mod criteria;
pub mod error;
pub mod history;
mod linalg;
pub mod scalar;
pub mod spectral;
pub mod stepper;
pub mod system;
pub mod trajectory;
pub mod verdict;
pub mod zoo;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete `f64` aliases for the common case.
pub type History64 = history::HistoryFunction<f64>;
pub type Trajectory64 = trajectory::Trajectory<f64>;
pub type System64 = system::DelaySystem<f64>;
pub type IntegratorOptions64 = stepper::IntegratorOptions<f64>;
pub type QuasiPolynomial64 = spectral::QuasiPolynomial<f64>;
pub type RootWindow64 = spectral::RootWindow<f64>;
pub type HopfPoint64 = spectral::HopfPoint<f64>;
pub type LotkaVolterraDistributed64 = chaintrick::LotkaVolterraDistributed<f64>;
pub type ModelSpec64 = zoo::ModelSpec<f64>;
pub type ScaledHutchinson64 = zoo::ScaledHutchinson<f64>;
