//! The built-in map families and the `RandomSystem` pair.

use crate::scalar::Scalar;

use super::{CoreSystem, PiecewiseLinearMap, SystemError, TailPoint};

/// Which of the two maps a step applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
}

impl Symbol {
    #[inline]
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    #[inline]
    pub fn flip(self) -> Self {
        match self {
            Symbol::Zero => Symbol::One,
            Symbol::One => Symbol::Zero,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Symbol::Zero => 0,
            Symbol::One => 1,
        }
    }
}

/// Built-in families plus fully custom piece lists.
///
/// * `Hy` — slopes 2 and 1/2 with the single breakpoint at 1/2.
/// * `GenHy { delta }` — breakpoints moved to `1/2 + δ` (map 0) and `1/2 − δ`
///   (map 1), `0 ≤ δ ≤ 1/6`.
/// * `PlGh { delta }` — map 0 as in `Hy` with breakpoint 2/3; map 1 has a
///   middle slope-1 branch `x + δ/2` on `[δ/2, 1−δ)`, `0 < δ ≤ 2/3`.
#[derive(Clone, Debug, PartialEq)]
pub enum Family<T> {
    Hy,
    GenHy { delta: T },
    PlGh { delta: T },
    Custom { f0: Vec<(T, T, T, T)>, f1: Vec<(T, T, T, T)>, c: T },
}

impl<T: Scalar> Family<T> {
    pub fn label(&self) -> String {
        match self {
            Family::Hy => "hy".into(),
            Family::GenHy { delta } => format!("gen-hy(delta={delta})"),
            Family::PlGh { delta } => format!("pl-gh(delta={delta})"),
            Family::Custom { .. } => "custom".into(),
        }
    }
}

/// The pair `(f₀, f₁)`, each chosen with probability 1/2, together with the
/// core parameter `c` the pair was validated against.
#[derive(Clone, Debug)]
pub struct RandomSystem<T> {
    f0: PiecewiseLinearMap<T>,
    f1: PiecewiseLinearMap<T>,
    c: T,
    family: Family<T>,
}

/// Snaps a family parameter down to a dyadic grid a few bits short of the
/// scalar's precision. Breakpoints like `1/2 + δ` and corner identities like
/// `2(1/2 + δ) − 1 = 2δ` are then exact in floating point, so structure and
/// closure checks can use exact comparisons. Dyadic inputs are unchanged.
fn snap_param<T: Scalar>(x: T) -> T {
    let unit = T::epsilon() * T::from_f64_lossy(16.0);
    (x / unit).floor() * unit
}

/// Builds a validated system. For the built-in families `c` follows the
/// standard recipes: `gen_hy` takes `c = 4δ` for `δ ≤ 1/8` and `c = 1/2`
/// otherwise; `pl_gh` takes the first breakpoint distance capped at 1/2.
/// Family parameters are snapped by [`snap_param`].
pub fn build_system<T: Scalar>(family: Family<T>) -> Result<RandomSystem<T>, SystemError> {
    let one = T::one();
    let half = T::half();
    let two = T::two();
    let (f0, f1, c) = match &family {
        Family::Hy => (hy_f0(half), hy_f1(half), half),
        Family::GenHy { delta } => {
            let sixth = one / T::from_f64_lossy(6.0);
            if *delta < T::zero() || *delta > sixth {
                return Err(SystemError::ParameterOutOfRange(format!(
                    "gen-hy requires 0 <= delta <= 1/6, got {delta}"
                )));
            }
            let d = snap_param(*delta);
            let c = if d <= T::from_f64_lossy(0.125) && d > T::zero() {
                T::from_f64_lossy(4.0) * d
            } else {
                half
            };
            (hy_f0(half + d), hy_f1(half - d), c)
        }
        Family::PlGh { delta } => {
            let two_thirds = two / T::from_f64_lossy(3.0);
            if *delta <= T::zero() || *delta > two_thirds {
                return Err(SystemError::ParameterOutOfRange(format!(
                    "pl-gh requires 0 < delta <= 2/3, got {delta}"
                )));
            }
            let d = snap_param(*delta);
            let f0 = hy_f0(two_thirds);
            let half_d = d * half;
            let f1 = PiecewiseLinearMap::new(vec![
                (T::zero(), half_d, two, T::zero()),
                (half_d, one - d, one, half_d),
                (one - d, one, half, half),
            ])?;
            // c = min{c₁⁽⁰⁾, 1 − c_{N₁−1}⁽¹⁾}, capped at the admissible 1/2
            let c = if d < half { d } else { half };
            (f0, f1, c)
        }
        Family::Custom { f0, f1, c } => {
            let f0 = PiecewiseLinearMap::new(f0.clone())?;
            let f1 = PiecewiseLinearMap::new(f1.clone())?;
            (f0, f1, *c)
        }
    };
    if c <= T::zero() || c > half {
        return Err(SystemError::ParameterOutOfRange(format!(
            "core parameter c must lie in (0, 1/2], got {c}"
        )));
    }
    check_tail_structure(&f0, &f1, c)?;
    Ok(RandomSystem { f0, f1, c, family })
}

/// `f₀` shape: `x/2` up to the breakpoint, `2x − 1` after it.
fn hy_f0<T: Scalar>(breakpoint: T) -> PiecewiseLinearMap<T> {
    PiecewiseLinearMap::new(vec![
        (T::zero(), breakpoint, T::half(), T::zero()),
        (breakpoint, T::one(), T::two(), -T::one()),
    ])
    .expect("built-in family pieces are valid")
}

/// `f₁` shape: `2x` up to the breakpoint, `(x+1)/2` after it.
fn hy_f1<T: Scalar>(breakpoint: T) -> PiecewiseLinearMap<T> {
    PiecewiseLinearMap::new(vec![
        (T::zero(), breakpoint, T::two(), T::zero()),
        (breakpoint, T::one(), T::half(), T::half()),
    ])
    .expect("built-in family pieces are valid")
}

/// The tail branches demanded of every system: `f₀ = x/2` on `[0, c)`,
/// `f₀ = 2x − 1` on `[1 − c/2, 1]`, `f₁ = 2x` on `[0, c/2)`, and
/// `f₁ = (x+1)/2` on `[1 − c, 1]`.
pub(crate) fn check_tail_structure<T: Scalar>(
    f0: &PiecewiseLinearMap<T>,
    f1: &PiecewiseLinearMap<T>,
    c: T,
) -> Result<(), SystemError> {
    let one = T::one();
    let half = T::half();
    let two = T::two();
    let half_c = c * half;
    let checks: [(&PiecewiseLinearMap<T>, T, T, T, T, &str); 4] = [
        (f0, T::zero(), c, half, T::zero(), "f0 = x/2 on [0, c)"),
        (f0, one - half_c, one, two, -one, "f0 = 2x - 1 on [1 - c/2, 1]"),
        (f1, T::zero(), half_c, two, T::zero(), "f1 = 2x on [0, c/2)"),
        (f1, one - c, one, half, half, "f1 = (x+1)/2 on [1 - c, 1]"),
    ];
    for (map, lo, hi, slope, intercept, what) in checks {
        if !map.agrees_with_affine(lo, hi, slope, intercept) {
            return Err(SystemError::StructureMismatch {
                c: c.to_f64_lossy(),
                detail: what.to_string(),
            });
        }
    }
    Ok(())
}

impl<T: Scalar> RandomSystem<T> {
    pub fn f0(&self) -> &PiecewiseLinearMap<T> {
        &self.f0
    }

    pub fn f1(&self) -> &PiecewiseLinearMap<T> {
        &self.f1
    }

    #[inline]
    pub fn map(&self, symbol: Symbol) -> &PiecewiseLinearMap<T> {
        match symbol {
            Symbol::Zero => &self.f0,
            Symbol::One => &self.f1,
        }
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    #[inline]
    pub fn step(&self, symbol: Symbol, p: TailPoint<T>) -> TailPoint<T> {
        self.map(symbol).evaluate(p)
    }

    /// Assembles and validates the induced core system for this `c`.
    pub fn core(&self) -> Result<CoreSystem<T>, SystemError> {
        self.validate_core(self.c)
    }

    /// Assembles and validates the induced core system for an arbitrary
    /// admissible `c`.
    pub fn validate_core(&self, c: T) -> Result<CoreSystem<T>, SystemError> {
        CoreSystem::from_system(self, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_hy_at_zero_matches_hy_pointwise() {
        let hy = build_system::<f64>(Family::Hy).unwrap();
        let gh = build_system(Family::GenHy { delta: 0.0 }).unwrap();
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            assert_eq!(hy.f0().eval_plain(x), gh.f0().eval_plain(x));
            assert_eq!(hy.f1().eval_plain(x), gh.f1().eval_plain(x));
        }
    }

    #[test]
    fn pl_gh_with_two_branches_is_gen_hy_sixth() {
        // delta = 2/3 collapses the middle branch; the result is the gen-hy
        // map at delta = 1/6. The two parameter snappings can disagree on a
        // sliver of one snap quantum around the breakpoints, so the grid
        // comparison allows that much; dyadic points match exactly.
        let pl = build_system::<f64>(Family::PlGh { delta: 2.0 / 3.0 }).unwrap();
        let gh = build_system(Family::GenHy { delta: 1.0 / 6.0 }).unwrap();
        let quantum = f64::EPSILON * 16.0;
        for k in 0..=3000 {
            let x = k as f64 / 3000.0;
            assert!((pl.f0().eval_plain(x) - gh.f0().eval_plain(x)).abs() <= 2.0 * quantum);
            assert!((pl.f1().eval_plain(x) - gh.f1().eval_plain(x)).abs() <= 2.0 * quantum);
        }
        for x in [0.0, 0.25, 0.5, 0.75, 0.875, 1.0] {
            assert_eq!(pl.f0().eval_plain(x), gh.f0().eval_plain(x));
            assert_eq!(pl.f1().eval_plain(x), gh.f1().eval_plain(x));
        }
    }

    #[test]
    fn delta_out_of_range_is_rejected() {
        assert!(matches!(
            build_system::<f64>(Family::GenHy { delta: 0.2 }),
            Err(SystemError::ParameterOutOfRange(_))
        ));
        assert!(matches!(
            build_system::<f64>(Family::PlGh { delta: 0.7 }),
            Err(SystemError::ParameterOutOfRange(_))
        ));
        assert!(matches!(
            build_system::<f64>(Family::PlGh { delta: 0.0 }),
            Err(SystemError::ParameterOutOfRange(_))
        ));
    }

    #[test]
    fn gen_hy_evaluate_example() {
        // delta = 1/8: f1 at 7/16 takes the (x+1)/2 branch since 7/16 >= 3/8
        let sys = build_system(Family::GenHy { delta: 0.125 }).unwrap();
        let out = sys.step(Symbol::One, TailPoint::new(7.0 / 16.0));
        assert_eq!(out.value_from_zero(), 23.0 / 32.0);
    }

    #[test]
    fn custom_structure_mismatch_is_caught() {
        // f1 lacks the 2x branch near 0
        let bad = Family::Custom {
            f0: vec![(0.0, 0.5, 0.5, 0.0), (0.5, 1.0, 2.0, -1.0)],
            f1: vec![(0.0, 1.0, 0.5, 0.5)],
            c: 0.5,
        };
        assert!(matches!(
            build_system::<f64>(bad),
            Err(SystemError::StructureMismatch { .. })
        ));
    }

    #[test]
    fn gen_hy_symmetry_off_breakpoints() {
        // f1(x) = 1 - f0(1 - x) away from the breakpoint set
        let sys = build_system(Family::GenHy { delta: 0.0625 }).unwrap();
        for k in 0..2000 {
            let x = (2 * k + 1) as f64 / 4001.0; // dense grid avoiding breakpoints
            let lhs = sys.f1().eval_plain(x);
            let rhs = 1.0 - sys.f0().eval_plain(1.0 - x);
            assert!((lhs - rhs).abs() < 1e-12, "x={x} lhs={lhs} rhs={rhs}");
        }
    }
}
