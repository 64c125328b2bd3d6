//! Scalar abstraction for the numeric kernels.
//!
//! Everything that matters here — dyadic breakpoints, exact doubling and
//! halving on tail cells, half-open interval comparisons — holds for any
//! binary floating-point type, so the map/measure/law code is written against
//! this trait and instantiated at `f64` (the default) or `f32`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    #[inline]
    fn half() -> Self {
        Self::from_f64(0.5).unwrap()
    }

    #[inline]
    fn two() -> Self {
        Self::from_f64(2.0).unwrap()
    }

    /// Lossy conversion from `f64`; panics only for exotic scalar types that
    /// cannot represent ordinary constants.
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("scalar conversion from f64")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar conversion to f64")
    }

    /// Error function, routed through `f64`.
    #[inline]
    fn erf(self) -> Self {
        Self::from_f64_lossy(libm::erf(self.to_f64_lossy()))
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_and_halving_are_exact_for_dyadics() {
        let x = 7.0f64 / 16.0;
        assert_eq!(x * 2.0 * 0.5, x);
        let y = 7.0f32 / 16.0;
        assert_eq!(y * 2.0 * 0.5, y);
    }

    #[test]
    fn erf_matches_known_value() {
        // erf(0.5) to 10 digits
        assert!((Scalar::erf(0.5f64) - 0.5204998778).abs() < 1e-9);
    }
}
