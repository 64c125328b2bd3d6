//! The cell partition `ζ = {Iₙ⁻, I₀, Iₙ⁺ : n ≥ 1}` of `[0,1)`.
//!
//! `Iₙ⁻ = [c/2ⁿ, c/2ⁿ⁻¹)`, `I₀ = [c, 1−c)`, `Iₙ⁺ = [1−c/2ⁿ⁻¹, 1−c/2ⁿ)`.
//! Note that in distance-from-1 coordinates the right cells are half-open on
//! the other side: `w = 1−x ∈ (c/2ⁿ, c/2ⁿ⁻¹]`.

use crate::scalar::Scalar;

use super::{SystemError, TailPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellIndex {
    /// `Iₙ⁻`, depth `n ≥ 1`.
    Left(u32),
    /// `I₀ = [c, 1−c)`; empty when `c = 1/2`.
    Core,
    /// `Iₙ⁺`, depth `n ≥ 1`.
    Right(u32),
}

impl CellIndex {
    pub fn depth(self) -> Option<u32> {
        match self {
            CellIndex::Left(n) | CellIndex::Right(n) => Some(n),
            CellIndex::Core => None,
        }
    }
}

/// The unique cell containing the point. The endpoints 0 and 1 belong to no
/// cell (formally depth → ∞) and are reported as `DegenerateBoundary`.
pub fn locate_cell<T: Scalar>(p: TailPoint<T>, c: T) -> Result<CellIndex, SystemError> {
    match p {
        TailPoint::FromZero(v) => {
            if v <= T::zero() || v >= T::one() {
                return Err(SystemError::DegenerateBoundary(v.to_f64_lossy()));
            }
            if v < c {
                Ok(CellIndex::Left(left_depth(v, c)))
            } else if v < T::one() - c {
                Ok(CellIndex::Core)
            } else {
                Ok(CellIndex::Right(right_depth(T::one() - v, c)))
            }
        }
        TailPoint::FromOne(w) => {
            if w <= T::zero() || w >= T::one() {
                return Err(SystemError::DegenerateBoundary(
                    (T::one() - w).to_f64_lossy(),
                ));
            }
            if w <= c {
                Ok(CellIndex::Right(right_depth(w, c)))
            } else if w > T::one() - c {
                Ok(CellIndex::Left(left_depth(T::one() - w, c)))
            } else {
                Ok(CellIndex::Core)
            }
        }
    }
}

/// Depth `n` with `c/2ⁿ ≤ v < c/2ⁿ⁻¹`, by exact halving of `c`.
fn left_depth<T: Scalar>(v: T, c: T) -> u32 {
    let mut bound = c * T::half();
    let mut n = 1u32;
    while v < bound {
        bound = bound * T::half();
        n += 1;
    }
    n
}

/// Depth `n` with `c/2ⁿ < w ≤ c/2ⁿ⁻¹` in distance-from-1 coordinates.
fn right_depth<T: Scalar>(w: T, c: T) -> u32 {
    let mut bound = c * T::half();
    let mut n = 1u32;
    while w <= bound {
        bound = bound * T::half();
        n += 1;
    }
    n
}

/// Cell bounds as a half-open interval `[lo, hi)` in plain coordinates.
/// Left bounds are exact (halvings of `c`); deep right bounds round once in
/// the final subtraction from 1.
pub fn cell_interval<T: Scalar>(idx: CellIndex, c: T) -> (T, T) {
    match idx {
        CellIndex::Core => (c, T::one() - c),
        CellIndex::Left(n) => {
            let lo = halve_n(c, n);
            (lo, lo * T::two())
        }
        CellIndex::Right(n) => {
            let w_hi = halve_n(c, n);
            (T::one() - w_hi * T::two(), T::one() - w_hi)
        }
    }
}

fn halve_n<T: Scalar>(c: T, n: u32) -> T {
    let mut v = c;
    for _ in 0..n {
        v = v * T::half();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_examples_at_c_half() {
        let c = 0.5f64;
        let cell = |x: f64| locate_cell(TailPoint::new(x), c).unwrap();
        assert_eq!(cell(0.3), CellIndex::Left(1)); // I₁⁻ = [1/4, 1/2)
        assert_eq!(cell(0.1), CellIndex::Left(3)); // I₃⁻ = [1/16, 1/8)
        assert_eq!(cell(0.95), CellIndex::Right(4)); // 1−x ∈ (1/32, 1/16]
    }

    #[test]
    fn interval_examples() {
        assert_eq!(cell_interval::<f64>(CellIndex::Left(1), 0.5), (0.25, 0.5));
        assert_eq!(
            cell_interval::<f64>(CellIndex::Core, 1.0 / 3.0),
            (1.0 / 3.0, 1.0 - 1.0 / 3.0)
        );
        assert_eq!(cell_interval::<f64>(CellIndex::Right(2), 0.5), (0.75, 0.875));
    }

    #[test]
    fn endpoints_are_degenerate() {
        assert!(matches!(
            locate_cell(TailPoint::FromZero(0.0f64), 0.5),
            Err(SystemError::DegenerateBoundary(_))
        ));
        assert!(matches!(
            locate_cell(TailPoint::FromOne(0.0f64), 0.5),
            Err(SystemError::DegenerateBoundary(_))
        ));
    }

    #[test]
    fn cell_boundaries_are_half_open() {
        let c = 0.5f64;
        // x = 1/4 is the left endpoint of I₁⁻
        assert_eq!(
            locate_cell(TailPoint::new(0.25), c).unwrap(),
            CellIndex::Left(1)
        );
        // x just below 1/4 (as 2⁻² − ulp) is in I₂⁻
        let below = f64::from_bits(0.25f64.to_bits() - 1);
        assert_eq!(
            locate_cell(TailPoint::new(below), c).unwrap(),
            CellIndex::Left(2)
        );
        // x = 1/2 = 1 − c is the left endpoint of I₁⁺
        assert_eq!(
            locate_cell(TailPoint::new(0.5), c).unwrap(),
            CellIndex::Right(1)
        );
        // x = 3/4 in the FromOne frame: w = 1/4, right cell 2
        assert_eq!(
            locate_cell(TailPoint::FromOne(0.25f64), c).unwrap(),
            CellIndex::Right(2)
        );
    }

    #[test]
    fn deep_cells_roundtrip_with_interval() {
        let c = 0.5f64;
        for n in 1..60u32 {
            let (lo, hi) = cell_interval::<f64>(CellIndex::Left(n), c);
            assert_eq!(
                locate_cell(TailPoint::FromZero(lo), c).unwrap(),
                CellIndex::Left(n)
            );
            let mid = 0.5 * (lo + hi);
            assert_eq!(
                locate_cell(TailPoint::FromZero(mid), c).unwrap(),
                CellIndex::Left(n)
            );
        }
    }
}
