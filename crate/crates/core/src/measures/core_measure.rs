//! Probability measures on `Y` and the annealed transfer operator.

use crate::scalar::Scalar;
use crate::systems::{CoreSystem, Symbol};

use super::ulam::TransferMatrix;
use super::MeasureError;

/// Either finitely many atoms or a piecewise-constant density on a uniform
/// grid over `Y`. Atom positions are matched by exact equality; the built-in
/// examples produce dyadic positions so collisions are exact and no epsilon
/// merging is involved.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureData<T> {
    /// Sorted `(position, weight)` pairs, positions strictly increasing.
    Discrete(Vec<(T, T)>),
    /// Density values per cell of the uniform grid on `Y`.
    StepDensity(Vec<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoreMeasure<T> {
    c: T,
    data: MeasureData<T>,
}

impl<T: Scalar> CoreMeasure<T> {
    /// A purely atomic measure; positions must lie in `Y`, weights must be
    /// positive. Atoms at exactly equal positions are merged.
    pub fn discrete(c: T, atoms: Vec<(T, T)>) -> Result<Self, MeasureError> {
        let half_c = c * T::half();
        let (y_lo, y_hi) = (half_c, T::one() - half_c);
        let mut atoms = atoms;
        for &(p, w) in &atoms {
            if p < y_lo || p >= y_hi {
                return Err(MeasureError::SupportOutsideCore(p.to_f64_lossy()));
            }
            if w <= T::zero() {
                return Err(MeasureError::NonPositiveWeight(w.to_f64_lossy()));
            }
        }
        if atoms.is_empty() {
            return Err(MeasureError::ZeroMass);
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(T, T)> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 = last.1 + w,
                _ => merged.push((p, w)),
            }
        }
        Ok(Self { c, data: MeasureData::Discrete(merged) })
    }

    /// A step density on the uniform `values.len()`-cell grid over `Y`.
    pub fn step_density(c: T, values: Vec<T>) -> Result<Self, MeasureError> {
        if values.is_empty() {
            return Err(MeasureError::ZeroMass);
        }
        for &v in &values {
            if v < T::zero() {
                return Err(MeasureError::NegativeDensity(v.to_f64_lossy()));
            }
        }
        Ok(Self { c, data: MeasureData::StepDensity(values) })
    }

    /// The uniform probability density on `Y`.
    pub fn uniform(c: T, grid_size: usize) -> Self {
        let width = T::one() - c;
        let d = T::one() / width;
        Self {
            c,
            data: MeasureData::StepDensity(vec![d; grid_size]),
        }
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn data(&self) -> &MeasureData<T> {
        &self.data
    }

    /// `[c/2, 1 − c/2)`.
    pub fn y_bounds(&self) -> (T, T) {
        let half_c = self.c * T::half();
        (half_c, T::one() - half_c)
    }

    pub fn grid_size(&self) -> Option<usize> {
        match &self.data {
            MeasureData::StepDensity(v) => Some(v.len()),
            MeasureData::Discrete(_) => None,
        }
    }

    pub fn cell_width(&self) -> Option<T> {
        self.grid_size().map(|m| {
            let (y_lo, y_hi) = self.y_bounds();
            (y_hi - y_lo) / T::from_usize(m).unwrap()
        })
    }

    pub fn total_mass(&self) -> T {
        match &self.data {
            MeasureData::Discrete(atoms) => atoms.iter().fold(T::zero(), |s, &(_, w)| s + w),
            MeasureData::StepDensity(values) => {
                let h = self.cell_width().unwrap();
                values.iter().fold(T::zero(), |s, &d| s + d) * h
            }
        }
    }

    /// Rescales to total mass one.
    pub fn normalized(&self) -> Result<Self, MeasureError> {
        let mass = self.total_mass();
        if mass <= T::zero() {
            return Err(MeasureError::ZeroMass);
        }
        let mut out = self.clone();
        match &mut out.data {
            MeasureData::Discrete(atoms) => {
                for a in atoms.iter_mut() {
                    a.1 = a.1 / mass;
                }
            }
            MeasureData::StepDensity(values) => {
                for v in values.iter_mut() {
                    *v = *v / mass;
                }
            }
        }
        Ok(out)
    }

    /// Measure of the half-open interval `[lo, hi)`.
    pub fn mass_in(&self, lo: T, hi: T) -> T {
        if hi <= lo {
            return T::zero();
        }
        match &self.data {
            MeasureData::Discrete(atoms) => atoms
                .iter()
                .filter(|&&(p, _)| p >= lo && p < hi)
                .fold(T::zero(), |s, &(_, w)| s + w),
            MeasureData::StepDensity(values) => {
                let (y_lo, _) = self.y_bounds();
                let h = self.cell_width().unwrap();
                let mut s = T::zero();
                for (i, &d) in values.iter().enumerate() {
                    let b_lo = y_lo + T::from_usize(i).unwrap() * h;
                    let b_hi = y_lo + T::from_usize(i + 1).unwrap() * h;
                    let a = if lo > b_lo { lo } else { b_lo };
                    let b = if hi < b_hi { hi } else { b_hi };
                    if a < b {
                        s = s + d * (b - a);
                    }
                }
                s
            }
        }
    }

    /// `(ν(I₁⁻), ν(I₀), ν(I₁⁺))`.
    pub fn side_masses(&self) -> (T, T, T) {
        let c = self.c;
        let half_c = c * T::half();
        let one = T::one();
        (
            self.mass_in(half_c, c),
            self.mass_in(c, one - c),
            self.mass_in(one - c, one - half_c),
        )
    }
}

/// `β = ν(I₁⁻)/(ν(I₁⁻)+ν(I₁⁺))` and `b = (1−β)/β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaB<T> {
    pub beta: T,
    pub b: T,
}

/// Fails with `ZeroSideMass` when either side carries no mass.
pub fn beta_b<T: Scalar>(m: &CoreMeasure<T>) -> Result<BetaB<T>, MeasureError> {
    let (minus, _, plus) = m.side_masses();
    if minus <= T::zero() || plus <= T::zero() {
        return Err(MeasureError::ZeroSideMass);
    }
    let beta = minus / (minus + plus);
    Ok(BetaB { beta, b: (T::one() - beta) / beta })
}

/// One application of the annealed transfer operator
/// `m ↦ ((h₀)_* m + (h₁)_* m)/2`.
pub fn annealed_push<T: Scalar>(
    core: &CoreSystem<T>,
    m: &CoreMeasure<T>,
) -> Result<CoreMeasure<T>, MeasureError> {
    let (y_lo, y_hi) = core.y_bounds();
    match m.data() {
        MeasureData::Discrete(atoms) => {
            let mut pushed = Vec::with_capacity(atoms.len() * 2);
            for &(p, w) in atoms {
                if p < y_lo || p >= y_hi {
                    return Err(MeasureError::SupportOutsideCore(p.to_f64_lossy()));
                }
                let hw = w * T::half();
                for sym in [Symbol::Zero, Symbol::One] {
                    pushed.push((core.map(sym).eval_plain(p), hw));
                }
            }
            CoreMeasure::discrete(m.c(), pushed)
        }
        MeasureData::StepDensity(values) => {
            let matrix = TransferMatrix::assemble(core, values.len())?;
            CoreMeasure::step_density(m.c(), matrix.apply(values))
        }
    }
}

/// Distance between two measures of the same variant: total variation for
/// atoms, `L¹` of the densities for step densities.
pub fn distance<T: Scalar>(a: &CoreMeasure<T>, b: &CoreMeasure<T>) -> Result<T, MeasureError> {
    match (a.data(), b.data()) {
        (MeasureData::Discrete(xs), MeasureData::Discrete(ys)) => {
            // merge the sorted atom lists, matching positions exactly
            let mut s = T::zero();
            let (mut i, mut j) = (0, 0);
            while i < xs.len() || j < ys.len() {
                if j >= ys.len() || (i < xs.len() && xs[i].0 < ys[j].0) {
                    s = s + xs[i].1;
                    i += 1;
                } else if i >= xs.len() || ys[j].0 < xs[i].0 {
                    s = s + ys[j].1;
                    j += 1;
                } else {
                    s = s + (xs[i].1 - ys[j].1).abs();
                    i += 1;
                    j += 1;
                }
            }
            Ok(s * T::half())
        }
        (MeasureData::StepDensity(xs), MeasureData::StepDensity(ys)) if xs.len() == ys.len() => {
            let h = a.cell_width().unwrap();
            let s = xs
                .iter()
                .zip(ys)
                .fold(T::zero(), |s, (&x, &y)| s + (x - y).abs());
            Ok(s * h)
        }
        _ => Err(MeasureError::VariantMismatch),
    }
}

/// Distance between `m` and its annealed push; zero exactly at invariant
/// measures.
pub fn invariance_residual<T: Scalar>(
    core: &CoreSystem<T>,
    m: &CoreMeasure<T>,
) -> Result<T, MeasureError> {
    let pushed = annealed_push(core, m)?;
    distance(m, &pushed)
}
