//! Measures on the core region `Y`, the annealed transfer operator, the Ulam
//! solver, and the σ-finite tail extension.

mod core_measure;
mod orbit;
mod sigma_finite;
mod ulam;

pub use core_measure::{
    annealed_push, beta_b, distance, invariance_residual, BetaB, CoreMeasure, MeasureData,
};
pub use orbit::{deterministic_core_orbit, OrbitFrequencies, DEFAULT_LATTICE_Q};
pub use sigma_finite::{extend_mu, mu_t_invariance_residual, SigmaFiniteTailMeasure};
pub use ulam::{ulam_fixed_density, TransferMatrix};

use crate::systems::SystemError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("support point {0} lies outside the core region Y")]
    SupportOutsideCore(f64),
    #[error("atom weight {0} is not positive")]
    NonPositiveWeight(f64),
    #[error("density value {0} is negative")]
    NegativeDensity(f64),
    #[error("measure has no mass")]
    ZeroMass,
    #[error("cannot compare measures of different variants")]
    VariantMismatch,
    #[error("grid of size {grid_size} does not align with the cell boundaries for c = {c}")]
    GridMisaligned { c: f64, grid_size: usize },
    #[error("power iteration did not converge after {iters} iterations (residual {residual:e})")]
    NonConvergence { iters: usize, residual: f64 },
    #[error("both side masses must be positive (nu(I1-) nu(I1+) > 0 fails)")]
    ZeroSideMass,
    #[error("tail truncation depth must be >= 1, got {0}")]
    BadDepth(usize),
    #[error("interval [{lo}, {hi}) escapes the tail truncation")]
    EscapesTruncation { lo: f64, hi: f64 },
    #[error(transparent)]
    System(#[from] SystemError),
}
