//! The induced pair `(h₀, h₁)` on `Y = [c/2, 1 − c/2)`.
//!
//! `h₀` applies the middle branch of `f₁` on `I₁⁻` and of `f₀` on `I₀ ∪ I₁⁺`;
//! `h₁` applies `f₁`'s middle branch on `I₁⁻ ∪ I₀` and `f₀`'s on `I₁⁺`. Both
//! must map `Y` into `Y`; that closure is the only codomain requirement and
//! is verified on every affine piece's endpoint images.

use crate::scalar::Scalar;

use super::{PiecewiseLinearMap, RandomSystem, Symbol, SystemError};

#[derive(Clone, Debug, PartialEq)]
pub struct CoreSystem<T> {
    h0: PiecewiseLinearMap<T>,
    h1: PiecewiseLinearMap<T>,
    c: T,
}

impl<T: Scalar> CoreSystem<T> {
    /// Assembles the core maps from a full system and verifies closure.
    pub(crate) fn from_system(
        system: &RandomSystem<T>,
        c: T,
    ) -> Result<Self, SystemError> {
        if c <= T::zero() || c > T::half() {
            return Err(SystemError::ParameterOutOfRange(format!(
                "core parameter c must lie in (0, 1/2], got {c}"
            )));
        }
        super::family::check_tail_structure(system.f0(), system.f1(), c)?;
        let half_c = c * T::half();
        let y_lo = half_c;
        let y_hi = T::one() - half_c;
        let split = T::one() - c; // boundary between g₁'s and g₀'s region in h₁
        let h0 = assemble(system.f1(), system.f0(), y_lo, c, y_hi)?;
        let h1 = assemble(system.f1(), system.f0(), y_lo, split, y_hi)?;
        let sys = Self { h0, h1, c };
        sys.check_closure()?;
        Ok(sys)
    }

    /// Builds a core system directly from piece lists on `Y`; used for
    /// stand-alone deterministic cores.
    pub fn from_parts(
        c: T,
        h0: Vec<(T, T, T, T)>,
        h1: Vec<(T, T, T, T)>,
    ) -> Result<Self, SystemError> {
        if c <= T::zero() || c > T::half() {
            return Err(SystemError::ParameterOutOfRange(format!(
                "core parameter c must lie in (0, 1/2], got {c}"
            )));
        }
        let half_c = c * T::half();
        let domain = (half_c, T::one() - half_c);
        let sys = Self {
            h0: PiecewiseLinearMap::with_domain(domain, h0)?,
            h1: PiecewiseLinearMap::with_domain(domain, h1)?,
            c,
        };
        sys.check_closure()?;
        Ok(sys)
    }

    fn check_closure(&self) -> Result<(), SystemError> {
        let (y_lo, y_hi) = self.y_bounds();
        for (name, map) in [("h0", &self.h0), ("h1", &self.h1)] {
            for p in map.pieces() {
                let at_lo = p.apply(p.lo);
                let at_hi = p.apply(p.hi);
                let ok = if p.slope > T::zero() {
                    // image [f(lo), f(hi))
                    at_lo >= y_lo && at_hi <= y_hi
                } else if p.slope < T::zero() {
                    // image (f(hi), f(lo)]
                    at_hi >= y_lo && at_lo < y_hi
                } else {
                    at_lo >= y_lo && at_lo < y_hi
                };
                if !ok {
                    return Err(SystemError::CoreNotInvariant {
                        c: self.c.to_f64_lossy(),
                        detail: format!(
                            "{name} piece on [{}, {}) has image [{}, {}] outside Y = [{}, {})",
                            p.lo,
                            p.hi,
                            at_lo.min(at_hi),
                            at_lo.max(at_hi),
                            y_lo,
                            y_hi
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn c(&self) -> T {
        self.c
    }

    /// `[c/2, 1 − c/2)`.
    pub fn y_bounds(&self) -> (T, T) {
        let half_c = self.c * T::half();
        (half_c, T::one() - half_c)
    }

    /// `(I₁⁻, I₀, I₁⁺)` bounds; `I₀` is empty when `c = 1/2`.
    pub fn cells(&self) -> ((T, T), (T, T), (T, T)) {
        let c = self.c;
        let half_c = c * T::half();
        let one = T::one();
        ((half_c, c), (c, one - c), (one - c, one - half_c))
    }

    #[inline]
    pub fn map(&self, symbol: Symbol) -> &PiecewiseLinearMap<T> {
        match symbol {
            Symbol::Zero => &self.h0,
            Symbol::One => &self.h1,
        }
    }

    pub fn h0(&self) -> &PiecewiseLinearMap<T> {
        &self.h0
    }

    pub fn h1(&self) -> &PiecewiseLinearMap<T> {
        &self.h1
    }

    /// `h₀ == h₁`, automatic when `c = 1/2`.
    pub fn is_deterministic(&self) -> bool {
        self.h0 == self.h1
    }

    /// One core step `h_symbol(y)`; errors when `y ∉ Y`.
    pub fn step(&self, symbol: Symbol, y: T) -> Result<T, SystemError> {
        let (y_lo, y_hi) = self.y_bounds();
        if y < y_lo || y >= y_hi {
            return Err(SystemError::OutsideCore(y.to_f64_lossy()));
        }
        Ok(self.map(symbol).eval_plain(y))
    }
}

/// Core map assembly: `f₁`'s branches on `[y_lo, split)`, `f₀`'s on
/// `[split, y_hi)`.
fn assemble<T: Scalar>(
    f1: &PiecewiseLinearMap<T>,
    f0: &PiecewiseLinearMap<T>,
    y_lo: T,
    split: T,
    y_hi: T,
) -> Result<PiecewiseLinearMap<T>, SystemError> {
    let mut pieces = Vec::new();
    clip_into(&mut pieces, f1, y_lo, split);
    clip_into(&mut pieces, f0, split, y_hi);
    PiecewiseLinearMap::with_domain((y_lo, y_hi), pieces)
}

fn clip_into<T: Scalar>(
    out: &mut Vec<(T, T, T, T)>,
    map: &PiecewiseLinearMap<T>,
    lo: T,
    hi: T,
) {
    for p in map.pieces() {
        let a = if p.lo > lo { p.lo } else { lo };
        let b = if p.hi < hi { p.hi } else { hi };
        if a < b {
            out.push((a, b, p.slope, p.intercept));
        }
    }
}
