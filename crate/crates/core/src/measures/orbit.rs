//! Exact long orbits of deterministic core maps.
//!
//! With dyadic branch coefficients every `f64` operation on the core region
//! is exact, so an expanding deterministic core consumes one significand bit
//! per step: any `f64` starting point collapses onto a short dyadic cycle
//! within ~53 steps and its visit frequencies say nothing about the
//! invariant density. Points of the form `n / (q·2^t)` for a large odd
//! prime `q` fix this: maps whose slopes are powers of two and whose
//! intercepts are dyadic keep the orbit on that lattice, the arithmetic
//! stays exact in integers, and a generic orbit explores on the order of
//! `q` states before cycling — behaving like a true irrational orbit.

use crate::scalar::Scalar;
use crate::systems::CoreSystem;

use super::MeasureError;

/// Default lattice scale: the safe prime 2⁶¹ − 293.
///
/// The orbit's residue mod `q` evolves by multiplication by powers of two,
/// so the cycle length is governed by the multiplicative order of 2 mod `q`.
/// A safe prime makes that order ~`q` (here 2⁶¹-ish), while for a Mersenne
/// prime it is catastrophically small (61), which would fold the orbit onto
/// a few dozen states.
pub const DEFAULT_LATTICE_Q: u64 = (1 << 61) - 293;

/// Visit frequencies of a deterministic core orbit across `I₁⁻`, `I₀`, `I₁⁺`.
#[derive(Clone, Copy, Debug)]
pub struct OrbitFrequencies {
    pub minus: f64,
    pub zero: f64,
    pub plus: f64,
    pub steps: u64,
}

impl OrbitFrequencies {
    /// Empirical counterpart of `β`: time in `I₁⁻` relative to `I₁⁻ ∪ I₁⁺`.
    pub fn beta(&self) -> f64 {
        self.minus / (self.minus + self.plus)
    }
}

/// A dyadic-rational constant `p / 2^s`, recovered exactly from an `f64`.
#[derive(Clone, Copy, Debug)]
struct Dyadic {
    p: i128,
    s: u32,
}

impl Dyadic {
    fn from_f64(x: f64, max_s: u32) -> Option<Self> {
        let mut v = x;
        let mut s = 0u32;
        while v.fract() != 0.0 {
            if s >= max_s {
                return None;
            }
            v *= 2.0;
            s += 1;
        }
        if v.abs() > 1e18 {
            return None;
        }
        Some(Self { p: v as i128, s })
    }
}

/// Exact lattice point `n / (q · 2^t)`.
#[derive(Clone, Copy, Debug)]
struct LatticePoint {
    n: u128,
    t: u32,
}

struct LatticePiece {
    /// breakpoint bounds as dyadics
    lo: Dyadic,
    hi: Dyadic,
    /// slope is 2^slope_exp
    slope_exp: i32,
    intercept: Dyadic,
}

// Bit budget: q < 2^62, t ≤ MAX_T and dyadic scales s ≤ MAX_S keep every
// intermediate below 2^112, safely inside i128.
const MAX_S: u32 = 20;
const MAX_T: u32 = 24;

/// `n/(q·2^t) < p/2^s`, exactly.
fn lattice_lt(point: &LatticePoint, q: u64, d: &Dyadic) -> bool {
    // n·2^s < p·q·2^t
    let lhs = (point.n as i128) << d.s;
    let rhs = d.p * q as i128 * (1i128 << point.t);
    lhs < rhs
}

fn to_lattice_pieces<T: Scalar>(
    core: &CoreSystem<T>,
) -> Result<Vec<LatticePiece>, MeasureError> {
    let mut out = Vec::new();
    for p in core.h0().pieces() {
        let slope = p.slope.to_f64_lossy();
        let slope_exp = match slope {
            s if s == 0.5 => -1,
            s if s == 1.0 => 0,
            s if s == 2.0 => 1,
            _ => {
                return Err(MeasureError::System(
                    crate::systems::SystemError::ParameterOutOfRange(format!(
                        "exact orbit supports slopes 1/2, 1, 2 only; got {slope}"
                    )),
                ))
            }
        };
        let conv = |v: f64, what: &str| {
            Dyadic::from_f64(v, MAX_S).ok_or_else(|| {
                MeasureError::System(crate::systems::SystemError::ParameterOutOfRange(
                    format!("exact orbit needs dyadic {what}, got {v}"),
                ))
            })
        };
        out.push(LatticePiece {
            lo: conv(p.lo.to_f64_lossy(), "breakpoint")?,
            hi: conv(p.hi.to_f64_lossy(), "breakpoint")?,
            slope_exp,
            intercept: conv(p.intercept.to_f64_lossy(), "intercept")?,
        });
    }
    Ok(out)
}

/// Runs `steps` iterations of a deterministic core on the `q`-lattice from a
/// point near `start_hint` and tallies cell visits. Errors when the core is
/// not deterministic or its coefficients leave the lattice.
pub fn deterministic_core_orbit<T: Scalar>(
    core: &CoreSystem<T>,
    start_hint: f64,
    steps: u64,
    q: u64,
) -> Result<OrbitFrequencies, MeasureError> {
    if !core.is_deterministic() {
        return Err(MeasureError::System(
            crate::systems::SystemError::ParameterOutOfRange(
                "exact orbit requires a deterministic core (h0 = h1)".into(),
            ),
        ));
    }
    let pieces = to_lattice_pieces(core)?;
    let c = core.c().to_f64_lossy();
    let c_dyadic = Dyadic::from_f64(c, MAX_S).ok_or(MeasureError::GridMisaligned {
        c,
        grid_size: 0,
    })?;
    let one_minus_c = Dyadic::from_f64(1.0 - c, MAX_S).unwrap();
    let (y_lo, y_hi) = core.y_bounds();
    // keep the start away from the Y edges so lattice rounding stays inside
    let start_hint = start_hint.clamp(
        y_lo.to_f64_lossy() + 0.01,
        y_hi.to_f64_lossy() - 0.01,
    );

    // snap the start onto the lattice with t = 8 and make it odd so the
    // orbit does not begin on a coarse dyadic sublattice
    let t0 = 8u32;
    let mut n0 = (start_hint * q as f64 * (1u64 << t0) as f64) as u128;
    if n0 % 2 == 0 {
        n0 += 1;
    }
    let mut point = LatticePoint { n: n0, t: t0 };

    let mut minus = 0u64;
    let mut zero = 0u64;
    let mut plus = 0u64;
    for _ in 0..steps {
        // tally the cell
        if lattice_lt(&point, q, &c_dyadic) {
            minus += 1;
        } else if lattice_lt(&point, q, &one_minus_c) {
            zero += 1;
        } else {
            plus += 1;
        }
        // find the branch and apply it exactly
        let piece = pieces
            .iter()
            .find(|p| !lattice_lt(&point, q, &p.lo) && lattice_lt(&point, q, &p.hi))
            .ok_or_else(|| {
                MeasureError::System(crate::systems::SystemError::OutsideCore(
                    point.n as f64 / (q as f64 * (1u64 << point.t) as f64),
                ))
            })?;
        // n/(q·2^t) · 2^e + p/2^s  =  (n·2^{m−t+e} + p·q·2^{m−s}) / (q·2^m)
        let t_after_slope = (point.t as i32 - piece.slope_exp).max(0) as u32;
        let n_after_slope = if (point.t as i32 - piece.slope_exp) < 0 {
            point.n << (piece.slope_exp - point.t as i32)
        } else {
            point.n
        };
        let m = t_after_slope.max(piece.intercept.s);
        let shifted_n = (n_after_slope as i128) << (m - t_after_slope);
        let shifted_p = piece.intercept.p * q as i128 * (1i128 << (m - piece.intercept.s));
        let total = shifted_n + shifted_p;
        debug_assert!(total >= 0, "orbit left [0,1)");
        let mut n_new = total as u128;
        let mut t_new = m;
        while t_new > 0 && n_new % 2 == 0 {
            n_new /= 2;
            t_new -= 1;
        }
        if t_new > MAX_T {
            return Err(MeasureError::System(
                crate::systems::SystemError::ParameterOutOfRange(
                    "lattice exponent overflow".into(),
                ),
            ));
        }
        point = LatticePoint { n: n_new, t: t_new };
    }
    let total = steps as f64;
    Ok(OrbitFrequencies {
        minus: minus as f64 / total,
        zero: zero as f64 / total,
        plus: plus as f64 / total,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::CoreSystem;

    fn skewed_core() -> CoreSystem<f64> {
        CoreSystem::from_parts(
            0.5,
            vec![(0.25, 0.5, 2.0, -0.25), (0.5, 0.75, 1.0, -0.25)],
            vec![(0.25, 0.5, 2.0, -0.25), (0.5, 0.75, 1.0, -0.25)],
        )
        .unwrap()
    }

    #[test]
    fn skewed_orbit_frequencies_match_invariant_density() {
        let freq =
            deterministic_core_orbit(&skewed_core(), 1.0 / 3.0, 1_000_000, DEFAULT_LATTICE_Q)
                .unwrap();
        assert!((freq.beta() - 2.0 / 3.0).abs() < 0.01, "beta {}", freq.beta());
        assert_eq!(freq.zero, 0.0);
    }

    #[test]
    fn f64_orbit_of_the_same_core_collapses() {
        // the phenomenon the lattice exists to avoid: plain f64 iteration is
        // exact on dyadics and falls onto the fixed point at 1/4
        let core = skewed_core();
        let mut y = 1.0 / 3.0;
        for _ in 0..200 {
            y = core.h0().eval_plain(y);
        }
        assert_eq!(y, 0.25);
    }

    #[test]
    fn random_core_is_rejected() {
        let sys = crate::systems::build_system(crate::systems::Family::PlGh {
            delta: 0.25,
        })
        .unwrap();
        let core = sys.core().unwrap();
        assert!(!core.is_deterministic());
        assert!(deterministic_core_orbit(&core, 0.3, 100, DEFAULT_LATTICE_Q).is_err());
    }
}
