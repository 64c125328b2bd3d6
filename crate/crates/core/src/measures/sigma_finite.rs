//! The σ-finite extension `μ` of a core-invariant `ν` over the tail cells.
//!
//! `μ = 2(f₀)ⁿ⁻¹_* ν₋` on `Iₙ⁻`, `ν₀` on `I₀`, `2(f₁)ⁿ⁻¹_* ν₊` on `Iₙ⁺`.
//! Since the tail branches are exact halvings in the side-local frame, the
//! level-`n` data is the base-level data with positions (or segment bounds)
//! halved `n−1` times and masses doubled once — so the per-level masses
//! `μ(Iₙ₊₁^±) = 2ν(I₁^±)` hold exactly, not just numerically.

use crate::randomwalk::TailMasses;
use crate::scalar::Scalar;
use crate::systems::{PiecewiseLinearMap, RandomSystem};

use super::{CoreMeasure, MeasureData, MeasureError};

/// Per-level data in side-local coordinates: left levels store `x`, right
/// levels store `w = 1 − x`.
#[derive(Clone, Debug)]
enum LevelData<T> {
    Atoms(Vec<(T, T)>),
    /// `(lo, hi, mass)` with mass spread uniformly over the segment.
    Segments(Vec<(T, T, T)>),
}

impl<T: Scalar> LevelData<T> {
    fn total(&self) -> T {
        match self {
            LevelData::Atoms(a) => a.iter().fold(T::zero(), |s, &(_, m)| s + m),
            LevelData::Segments(segs) => segs.iter().fold(T::zero(), |s, &(_, _, m)| s + m),
        }
    }

    fn halved(&self) -> Self {
        let half = T::half();
        match self {
            LevelData::Atoms(a) => {
                LevelData::Atoms(a.iter().map(|&(p, m)| (p * half, m)).collect())
            }
            LevelData::Segments(segs) => LevelData::Segments(
                segs.iter().map(|&(lo, hi, m)| (lo * half, hi * half, m)).collect(),
            ),
        }
    }

    /// Mass in `[lo, hi)` of the side-local coordinate, with `closed_hi`
    /// selecting the right-tail convention `(lo, hi]` for atom membership.
    fn mass_between(&self, lo: T, hi: T, closed_hi: bool) -> T {
        if hi <= lo {
            return T::zero();
        }
        match self {
            LevelData::Atoms(a) => a
                .iter()
                .filter(|&&(p, _)| {
                    if closed_hi {
                        p > lo && p <= hi
                    } else {
                        p >= lo && p < hi
                    }
                })
                .fold(T::zero(), |s, &(_, m)| s + m),
            LevelData::Segments(segs) => segs.iter().fold(T::zero(), |s, &(a, b, m)| {
                let l = if lo > a { lo } else { a };
                let h = if hi < b { hi } else { b };
                if l < h {
                    s + m * (h - l) / (b - a)
                } else {
                    s
                }
            }),
        }
    }
}

/// `μ` truncated at tail level `depth`.
#[derive(Clone, Debug)]
pub struct SigmaFiniteTailMeasure<T> {
    nu: CoreMeasure<T>,
    depth: usize,
    left: Vec<LevelData<T>>,
    right: Vec<LevelData<T>>,
}

/// Materializes `μ` down to `depth` tail levels on each side.
pub fn extend_mu<T: Scalar>(
    nu: &CoreMeasure<T>,
    depth: usize,
    system: &RandomSystem<T>,
) -> Result<SigmaFiniteTailMeasure<T>, MeasureError> {
    if depth < 1 {
        return Err(MeasureError::BadDepth(depth));
    }
    crate::systems::check_tail_structure(system.f0(), system.f1(), nu.c())?;
    let c = nu.c();
    let half_c = c * T::half();
    let one = T::one();
    let two = T::two();

    // base level: μ on I₁^± is 2ν_∓, in side-local coordinates
    let (base_left, base_right) = match nu.data() {
        MeasureData::Discrete(atoms) => {
            let mut l = Vec::new();
            let mut r = Vec::new();
            for &(p, w) in atoms {
                if p < c {
                    l.push((p, two * w));
                } else if p >= one - c {
                    r.push((one - p, two * w));
                }
            }
            (LevelData::Atoms(l), LevelData::Atoms(r))
        }
        MeasureData::StepDensity(values) => {
            let (y_lo, _) = nu.y_bounds();
            let h = nu.cell_width().unwrap();
            let mut l = Vec::new();
            let mut r = Vec::new();
            for (i, &d) in values.iter().enumerate() {
                if d == T::zero() {
                    continue;
                }
                let b_lo = y_lo + T::from_usize(i).unwrap() * h;
                let b_hi = y_lo + T::from_usize(i + 1).unwrap() * h;
                // clip to I₁⁻ = [c/2, c)
                let a = if b_lo > half_c { b_lo } else { half_c };
                let b = if b_hi < c { b_hi } else { c };
                if a < b {
                    l.push((a, b, two * d * (b - a)));
                }
                // clip to I₁⁺ = [1−c, 1−c/2), stored as w = 1−x
                let a = if b_lo > one - c { b_lo } else { one - c };
                let b = if b_hi < one - half_c { b_hi } else { one - half_c };
                if a < b {
                    r.push((one - b, one - a, two * d * (b - a)));
                }
            }
            (LevelData::Segments(l), LevelData::Segments(r))
        }
    };

    let mut left = Vec::with_capacity(depth);
    let mut right = Vec::with_capacity(depth);
    left.push(base_left);
    right.push(base_right);
    for n in 1..depth {
        let next_l = left[n - 1].halved();
        let next_r = right[n - 1].halved();
        left.push(next_l);
        right.push(next_r);
    }
    Ok(SigmaFiniteTailMeasure { nu: nu.clone(), depth, left, right })
}

impl<T: Scalar> SigmaFiniteTailMeasure<T> {
    pub fn nu(&self) -> &CoreMeasure<T> {
        &self.nu
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn c(&self) -> T {
        self.nu.c()
    }

    /// `μ(Iₙ^±)` for `n ≤ depth`, and `μ(I₀)`.
    pub fn cell_mass(&self, idx: crate::systems::CellIndex) -> Result<T, MeasureError> {
        use crate::systems::CellIndex;
        let c = self.c();
        match idx {
            CellIndex::Core => Ok(self.nu.mass_in(c, T::one() - c)),
            CellIndex::Left(n) => self
                .left
                .get(n as usize - 1)
                .map(LevelData::total)
                .ok_or(MeasureError::EscapesTruncation { lo: 0.0, hi: 0.0 }),
            CellIndex::Right(n) => self
                .right
                .get(n as usize - 1)
                .map(LevelData::total)
                .ok_or(MeasureError::EscapesTruncation { lo: 0.0, hi: 0.0 }),
        }
    }

    /// `μ(Y)`, `μ(I₁⁻)`, `μ(I₁⁺)` as plain `f64`, the quantities the
    /// wandering-rate sums take.
    pub fn tail_masses(&self) -> TailMasses {
        let c = self.c();
        let i0 = self.nu.mass_in(c, T::one() - c);
        let m = self.left[0].total();
        let p = self.right[0].total();
        TailMasses {
            y: (m + i0 + p).to_f64_lossy(),
            i1_minus: m.to_f64_lossy(),
            i1_plus: p.to_f64_lossy(),
        }
    }

    /// The `x`-interval covered by the truncation: `[c/2^depth, 1 − c/2^depth)`.
    pub fn covered(&self) -> (T, T) {
        let mut bound = self.c();
        for _ in 0..self.depth {
            bound = bound * T::half();
        }
        (bound, T::one() - bound)
    }

    /// `μ([lo, hi))` for an interval inside the truncated region.
    pub fn measure_interval(&self, lo: T, hi: T) -> Result<T, MeasureError> {
        if hi <= lo {
            return Ok(T::zero());
        }
        let (cov_lo, cov_hi) = self.covered();
        if lo < cov_lo || hi > cov_hi {
            return Err(MeasureError::EscapesTruncation {
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
        let c = self.c();
        let one = T::one();
        let mut total = self.nu.mass_in(if lo > c { lo } else { c }, {
            let cap = one - c;
            if hi < cap {
                hi
            } else {
                cap
            }
        });
        // left levels: x-range of level n is [c/2ⁿ, c/2ⁿ⁻¹)
        let mut level_hi = c;
        for data in &self.left {
            let level_lo = level_hi * T::half();
            let a = if lo > level_lo { lo } else { level_lo };
            let b = if hi < level_hi { hi } else { level_hi };
            total = total + data.mass_between(a, b, false);
            level_hi = level_lo;
        }
        // right levels: w-range of level n is (c/2ⁿ, c/2ⁿ⁻¹]; the query
        // [lo, hi) in x becomes (1−hi, 1−lo] in w
        let wq_lo = one - hi;
        let wq_hi = one - lo;
        let mut level_w_hi = c;
        for data in &self.right {
            let level_w_lo = level_w_hi * T::half();
            let a = if wq_lo > level_w_lo { wq_lo } else { level_w_lo };
            let b = if wq_hi < level_w_hi { wq_hi } else { level_w_hi };
            total = total + data.mass_between(a, b, true);
            level_w_hi = level_w_lo;
        }
        Ok(total)
    }
}

/// `max_A |½μ(f₀⁻¹A) + ½μ(f₁⁻¹A) − μ(A)|` over the given intervals. Test
/// sets must sit within `depth − 1` levels so their preimages stay inside
/// the truncation.
pub fn mu_t_invariance_residual<T: Scalar>(
    system: &RandomSystem<T>,
    mu: &SigmaFiniteTailMeasure<T>,
    test_sets: &[(T, T)],
) -> Result<T, MeasureError> {
    let mut inner = mu.c();
    for _ in 0..mu.depth().saturating_sub(1) {
        inner = inner * T::half();
    }
    let mut worst = T::zero();
    for &(lo, hi) in test_sets {
        if hi <= lo {
            continue;
        }
        if lo < inner || hi > T::one() - inner {
            return Err(MeasureError::EscapesTruncation {
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
        let m0 = preimage_measure(system.f0(), mu, lo, hi)?;
        let m1 = preimage_measure(system.f1(), mu, lo, hi)?;
        let m = mu.measure_interval(lo, hi)?;
        let r = (T::half() * m0 + T::half() * m1 - m).abs();
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// `μ(f⁻¹[lo, hi))`, accumulated branch by branch.
fn preimage_measure<T: Scalar>(
    map: &PiecewiseLinearMap<T>,
    mu: &SigmaFiniteTailMeasure<T>,
    lo: T,
    hi: T,
) -> Result<T, MeasureError> {
    let mut total = T::zero();
    for p in map.pieces() {
        if p.slope == T::zero() {
            if p.intercept >= lo && p.intercept < hi {
                total = total + mu.measure_interval(p.lo, p.hi)?;
            }
            continue;
        }
        let at_lo = p.apply(p.lo);
        let at_hi = p.apply(p.hi);
        let (img_lo, img_hi) = if at_lo < at_hi { (at_lo, at_hi) } else { (at_hi, at_lo) };
        let a = if lo > img_lo { lo } else { img_lo };
        let b = if hi < img_hi { hi } else { img_hi };
        if a >= b {
            continue;
        }
        let x1 = (a - p.intercept) / p.slope;
        let x2 = (b - p.intercept) / p.slope;
        let (pre_lo, pre_hi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
        total = total + mu.measure_interval(pre_lo, pre_hi)?;
    }
    Ok(total)
}
