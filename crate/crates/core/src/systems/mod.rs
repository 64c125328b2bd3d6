//! Interval maps, built-in map families, the induced core system on the
//! central region `Y = I₁⁻ ∪ I₀ ∪ I₁⁺`, and the dyadic tail cell partition.

mod cells;
mod core_system;
mod family;
mod map;
mod point;

pub use cells::{cell_interval, locate_cell, CellIndex};
pub use core_system::CoreSystem;
pub use family::{build_system, Family, RandomSystem, Symbol};
pub use map::{Piece, PiecewiseLinearMap, StepKind};
pub use point::TailPoint;

pub(crate) use family::check_tail_structure;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("invalid pieces: {0}")]
    InvalidPieces(String),
    #[error("tail branch structure does not hold for c = {c}: {detail}")]
    StructureMismatch { c: f64, detail: String },
    #[error("core maps are not Y-invariant for c = {c}: {detail}")]
    CoreNotInvariant { c: f64, detail: String },
    #[error("x = {0} lies on the degenerate endpoint orbit")]
    DegenerateBoundary(f64),
    #[error("y = {0} is outside the core region Y")]
    OutsideCore(f64),
}
