//! Ulam discretization of the annealed transfer operator and the power
//! iteration solver for a core-invariant step density.

use rayon::prelude::*;

use crate::scalar::Scalar;
use crate::systems::{CoreSystem, Symbol};

use super::{CoreMeasure, MeasureError};

/// Column-stochastic sparse matrix over the grid cells: column `j` lists
/// `(target cell, mass fraction)` pairs for the annealed image of cell `j`'s
/// mass. Assembled exactly from the affine branches, not by sampling.
#[derive(Clone, Debug)]
pub struct TransferMatrix<T> {
    grid_size: usize,
    cols: Vec<Vec<(u32, T)>>,
}

impl<T: Scalar> TransferMatrix<T> {
    /// Requires the grid to place cell boundaries of `I₁⁻/I₀/I₁⁺` on grid
    /// points, so no mass is smeared across them.
    pub fn assemble(core: &CoreSystem<T>, grid_size: usize) -> Result<Self, MeasureError> {
        if grid_size < 2 {
            return Err(MeasureError::GridMisaligned {
                c: core.c().to_f64_lossy(),
                grid_size,
            });
        }
        let (y_lo, y_hi) = core.y_bounds();
        let width = y_hi - y_lo;
        let m_t = T::from_usize(grid_size).unwrap();
        // boundary between I₁⁻ and I₀ must be a grid point (its mirror then is too)
        let t1 = (core.c() - y_lo) / width * m_t;
        if (t1 - t1.round()).abs() > T::from_f64_lossy(1e-9) {
            return Err(MeasureError::GridMisaligned {
                c: core.c().to_f64_lossy(),
                grid_size,
            });
        }
        let h = width / m_t;
        let boundary = |i: usize| y_lo + T::from_usize(i).unwrap() * h;
        let cols: Vec<Vec<(u32, T)>> = (0..grid_size)
            .into_par_iter()
            .map(|j| {
                let cell_lo = boundary(j);
                let cell_hi = boundary(j + 1);
                let cell_w = cell_hi - cell_lo;
                let mut entries: Vec<(u32, T)> = Vec::new();
                let mut add = |i: usize, w: T| {
                    if w <= T::zero() {
                        return;
                    }
                    let i = i as u32;
                    match entries.iter_mut().find(|(k, _)| *k == i) {
                        Some(e) => e.1 = e.1 + w,
                        None => entries.push((i, w)),
                    }
                };
                for sym in [Symbol::Zero, Symbol::One] {
                    for p in core.map(sym).pieces() {
                        let lo = if p.lo > cell_lo { p.lo } else { cell_lo };
                        let hi = if p.hi < cell_hi { p.hi } else { cell_hi };
                        if lo >= hi {
                            continue;
                        }
                        // fraction of the column's mass this sub-interval carries,
                        // halved for the annealed average
                        let frac = (hi - lo) / cell_w * T::half();
                        if p.slope == T::zero() {
                            let y = p.intercept;
                            let i = locate(y, y_lo, h, grid_size);
                            add(i, frac);
                            continue;
                        }
                        let (y1, y2) = {
                            let a = p.apply(lo);
                            let b = p.apply(hi);
                            if a < b {
                                (a, b)
                            } else {
                                (b, a)
                            }
                        };
                        let img_w = y2 - y1;
                        let mut i = locate(y1, y_lo, h, grid_size);
                        loop {
                            let b_lo = boundary(i);
                            let b_hi = boundary(i + 1);
                            let a = if y1 > b_lo { y1 } else { b_lo };
                            let b = if y2 < b_hi { y2 } else { b_hi };
                            if a < b {
                                add(i, frac * (b - a) / img_w);
                            }
                            if b_hi >= y2 || i + 1 >= grid_size {
                                break;
                            }
                            i += 1;
                        }
                    }
                }
                entries
            })
            .collect();
        Ok(Self { grid_size, cols })
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Applies the matrix to a density vector and returns the new densities.
    pub fn apply(&self, densities: &[T]) -> Vec<T> {
        debug_assert_eq!(densities.len(), self.grid_size);
        // masses and densities differ by the constant cell width, which the
        // matrix preserves, so we can work on densities directly
        let mut out = vec![T::zero(); self.grid_size];
        for (j, col) in self.cols.iter().enumerate() {
            let d = densities[j];
            if d == T::zero() {
                continue;
            }
            for &(i, w) in col {
                out[i as usize] = out[i as usize] + d * w;
            }
        }
        out
    }
}

#[inline]
fn locate<T: Scalar>(y: T, y_lo: T, h: T, grid_size: usize) -> usize {
    let raw = ((y - y_lo) / h).floor().to_f64_lossy() as isize;
    raw.clamp(0, grid_size as isize - 1) as usize
}

/// Power iteration of the annealed Ulam matrix from the uniform density.
/// Returns a step density whose invariance residual is below `tol` (this is
/// checked, and is exactly the stopping rule). Existence of an invariant
/// probability measure is not guaranteed in general, so `NonConvergence`
/// after `max_iters` is a legitimate outcome.
pub fn ulam_fixed_density<T: Scalar>(
    core: &CoreSystem<T>,
    grid_size: usize,
    tol: T,
    max_iters: usize,
) -> Result<CoreMeasure<T>, MeasureError> {
    let matrix = TransferMatrix::assemble(core, grid_size)?;
    let (y_lo, y_hi) = core.y_bounds();
    let h = (y_hi - y_lo) / T::from_usize(grid_size).unwrap();
    let mut v = vec![T::one() / (y_hi - y_lo); grid_size];
    let mut residual = T::infinity();
    for _ in 0..max_iters {
        let next = matrix.apply(&v);
        residual = v
            .iter()
            .zip(&next)
            .fold(T::zero(), |s, (&a, &b)| s + (a - b).abs())
            * h;
        if residual < tol {
            return CoreMeasure::step_density(core.c(), v);
        }
        v = next;
    }
    Err(MeasureError::NonConvergence {
        iters: max_iters,
        residual: residual.to_f64_lossy(),
    })
}
