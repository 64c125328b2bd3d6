//! Simulation and exact-computation toolkit for random iterations of a pair
//! of piecewise-linear interval maps whose endpoints are fixed and neutral
//! *on average* (slope pairs 2 and 1/2).
//!
//! The crate is organised around the objects such a study needs:
//!
//! - [`systems`] — the interval maps themselves, the built-in map families,
//!   the induced core system on the central region `Y`, and the dyadic tail
//!   cell partition together with a precision-preserving point representation.
//! - [`measures`] — measures on `Y`, the annealed transfer operator, an Ulam
//!   solver for invariant densities, and the σ-finite extension of a core
//!   measure over the tail cells.
//! - [`randomwalk`] — exact first-passage combinatorics of the symmetric
//!   simple random walk that drives tail excursions, and the wandering-rate
//!   sums built from them.
//! - [`montecarlo`] — reproducible trajectory ensembles for occupation-time
//!   and square-root-scale visit statistics.
//! - [`stats`] — the closed-form limit laws (generalized arcsine and
//!   half-normal) plus Kolmogorov–Smirnov machinery to compare ensembles
//!   against them.
//!
//! Numeric kernels are generic over the scalar type through [`scalar::Scalar`]
//! (any `num-traits` float works); the simulation and I/O layers use the
//! concrete [`Real`] = `f64` aliases below.

pub mod measures;
pub mod montecarlo;
pub mod randomwalk;
pub mod scalar;
pub mod stats;
pub mod systems;
pub mod textio;

pub use scalar::Scalar;

/// Default scalar for simulations, text I/O and the CLI.
pub type Real = f64;

/// [`systems::PiecewiseLinearMap`] at the default scalar.
pub type Map = systems::PiecewiseLinearMap<Real>;
/// [`systems::RandomSystem`] at the default scalar.
pub type System = systems::RandomSystem<Real>;
/// [`systems::CoreSystem`] at the default scalar.
pub type Core = systems::CoreSystem<Real>;
/// [`systems::TailPoint`] at the default scalar.
pub type Point = systems::TailPoint<Real>;
/// [`measures::CoreMeasure`] at the default scalar.
pub type Measure = measures::CoreMeasure<Real>;
/// [`measures::SigmaFiniteTailMeasure`] at the default scalar.
pub type TailMeasure = measures::SigmaFiniteTailMeasure<Real>;
