pub mod analyze;
pub mod check;
pub mod hopf;
pub mod oscillation;
pub mod reduce;
pub mod simulate;
pub mod sweep;
