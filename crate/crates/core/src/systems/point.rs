//! Two-frame point representation.
//!
//! A point of `[0,1]` is stored either as its distance from 0 or as its
//! distance from 1. In the frame matching its nearest endpoint, the four tail
//! branches `x/2`, `2x`, `2x−1`, `(x+1)/2` all act as a pure multiplication
//! by 2 or 1/2, which binary floating point performs exactly. This is what
//! keeps million-step tail excursions bit-exact: without the `FromOne` frame,
//! `(x+1)/2` near 1 would round and the orbit would be absorbed at 1.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailPoint<T> {
    /// Stores `x` itself.
    FromZero(T),
    /// Stores `1 − x`.
    FromOne(T),
}

impl<T: Scalar> TailPoint<T> {
    /// Canonical constructor: points left of 1/2 are kept in the `FromZero`
    /// frame, the rest in `FromOne`.
    #[inline]
    pub fn new(x: T) -> Self {
        if x < T::half() {
            TailPoint::FromZero(x)
        } else {
            TailPoint::FromOne(T::one() - x)
        }
    }

    /// The point as a plain number in `[0,1]`. Rounds for `FromOne` values
    /// deeper than the scalar's epsilon; use frame-aware accessors when
    /// exactness matters.
    #[inline]
    pub fn value_from_zero(self) -> T {
        match self {
            TailPoint::FromZero(v) => v,
            TailPoint::FromOne(w) => T::one() - w,
        }
    }

    /// Distance from 1, i.e. `1 − x`.
    #[inline]
    pub fn value_from_one(self) -> T {
        match self {
            TailPoint::FromZero(v) => T::one() - v,
            TailPoint::FromOne(w) => w,
        }
    }

    /// The raw stored value.
    #[inline]
    pub fn stored(self) -> T {
        match self {
            TailPoint::FromZero(v) => v,
            TailPoint::FromOne(w) => w,
        }
    }

    #[inline]
    pub fn is_from_one(self) -> bool {
        matches!(self, TailPoint::FromOne(_))
    }

    /// Exact test of `x ≥ 1/2` in either frame.
    #[inline]
    pub fn ge_half(self) -> bool {
        match self {
            TailPoint::FromZero(v) => v >= T::half(),
            TailPoint::FromOne(w) => w <= T::half(),
        }
    }

    /// Applies a pure scaling in the active frame (exact for factors 2, 1/2).
    #[inline]
    pub fn scale(self, factor: T) -> Self {
        match self {
            TailPoint::FromZero(v) => TailPoint::FromZero(factor * v),
            TailPoint::FromOne(w) => TailPoint::FromOne(factor * w),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_split_at_half() {
        assert_eq!(TailPoint::new(0.25), TailPoint::FromZero(0.25));
        assert_eq!(TailPoint::new(0.5), TailPoint::FromOne(0.5));
        assert_eq!(TailPoint::new(0.75), TailPoint::FromOne(0.25));
    }

    #[test]
    fn ge_half_is_frame_exact() {
        assert!(TailPoint::FromOne(1e-300f64).ge_half());
        assert!(!TailPoint::FromZero(1e-300f64).ge_half());
        assert!(TailPoint::FromZero(0.5f64).ge_half());
    }
}
