//! Piecewise-linear interval maps with half-open branches.

use crate::scalar::Scalar;

use super::{SystemError, TailPoint};

/// One affine branch acting on `[lo, hi)`. The last branch of a map whose
/// domain ends at 1 also takes `x = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece<T> {
    pub lo: T,
    pub hi: T,
    pub slope: T,
    pub intercept: T,
}

/// How [`PiecewiseLinearMap::evaluate_traced`] performed a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Exact power-of-two scaling in the point's frame.
    Scaling,
    /// General affine application with re-framing.
    General,
}

impl<T: Scalar> Piece<T> {
    #[inline]
    pub fn apply(&self, x: T) -> T {
        self.slope * x + self.intercept
    }

    /// Image of the half-open branch as `(min, max, max_attained)`.
    fn image(&self) -> (T, T, bool) {
        let at_lo = self.apply(self.lo);
        let at_hi = self.apply(self.hi);
        if self.slope >= T::zero() {
            // [f(lo), f(hi)) — the sup is not attained
            (at_lo, at_hi, false)
        } else {
            // (f(hi), f(lo)] — the max is attained at lo
            (at_hi, at_lo, true)
        }
    }
}

/// A map of an interval given by finitely many affine branches that tile the
/// domain exactly. Breakpoint comparisons are exact; the built-in families
/// have dyadic breakpoints so there is no tie ambiguity.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinearMap<T> {
    pieces: Vec<Piece<T>>,
    domain: (T, T),
}

impl<T: Scalar> PiecewiseLinearMap<T> {
    /// A map of `[0,1]`. Empty branches (`lo == hi`) are dropped.
    pub fn new(pieces: Vec<(T, T, T, T)>) -> Result<Self, SystemError> {
        Self::with_domain((T::zero(), T::one()), pieces)
    }

    /// A map of `[domain.0, domain.1)`; branch images must stay in `[0,1]`.
    pub fn with_domain(domain: (T, T), pieces: Vec<(T, T, T, T)>) -> Result<Self, SystemError> {
        let pieces: Vec<Piece<T>> = pieces
            .into_iter()
            .map(|(lo, hi, slope, intercept)| Piece { lo, hi, slope, intercept })
            .filter(|p| p.lo < p.hi)
            .collect();
        if pieces.is_empty() {
            return Err(SystemError::InvalidPieces("no non-empty pieces".into()));
        }
        if pieces[0].lo != domain.0 {
            return Err(SystemError::InvalidPieces(format!(
                "first piece starts at {}, domain starts at {}",
                pieces[0].lo, domain.0
            )));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(SystemError::InvalidPieces(format!(
                    "gap or overlap between {} and {}",
                    w[0].hi, w[1].lo
                )));
            }
        }
        let last = pieces.last().unwrap();
        if last.hi != domain.1 {
            return Err(SystemError::InvalidPieces(format!(
                "last piece ends at {}, domain ends at {}",
                last.hi, domain.1
            )));
        }
        for p in &pieces {
            let (lo, hi, _) = p.image();
            if lo < T::zero() || hi > T::one() {
                return Err(SystemError::InvalidPieces(format!(
                    "piece on [{}, {}) maps outside [0,1]: image [{}, {}]",
                    p.lo, p.hi, lo, hi
                )));
            }
        }
        Ok(Self { pieces, domain })
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn domain(&self) -> (T, T) {
        self.domain
    }

    /// The branch containing `x` under the half-open convention; `x` at or
    /// beyond the domain end falls to the last branch.
    #[inline]
    pub fn piece_at(&self, x: T) -> &Piece<T> {
        for p in &self.pieces {
            if x < p.hi {
                return p;
            }
        }
        self.pieces.last().unwrap()
    }

    /// Plain affine evaluation, no frame bookkeeping.
    #[inline]
    pub fn eval_plain(&self, x: T) -> T {
        self.piece_at(x).apply(x)
    }

    /// Frame-aware evaluation. When the selected branch, rewritten in the
    /// point's active frame, is a pure multiplication by 2, 1 or 1/2 the step
    /// is taken as an exact scaling; otherwise the image is computed and the
    /// result re-framed at 1/2.
    #[inline]
    pub fn evaluate(&self, p: TailPoint<T>) -> TailPoint<T> {
        self.evaluate_traced(p).0
    }

    /// Like [`evaluate`](Self::evaluate), also reporting whether the step was
    /// an exact in-frame scaling or a general affine application.
    #[inline]
    pub fn evaluate_traced(&self, p: TailPoint<T>) -> (TailPoint<T>, StepKind) {
        let x = p.value_from_zero();
        let piece = self.piece_at(x);
        let (a, b) = (piece.slope, piece.intercept);
        let local_intercept = match p {
            TailPoint::FromZero(_) => b,
            // w ↦ 1 − f(1−w) = (1 − a − b) + a·w
            TailPoint::FromOne(_) => T::one() - a - b,
        };
        if local_intercept == T::zero() && (a == T::two() || a == T::half() || a == T::one()) {
            return (p.scale(a), StepKind::Scaling);
        }
        (TailPoint::new(a * x + b), StepKind::General)
    }

    /// Interior breakpoints (piece boundaries away from the domain ends).
    pub fn interior_breakpoints(&self) -> Vec<T> {
        self.pieces.iter().skip(1).map(|p| p.lo).collect()
    }

    /// True on the sub-interval `[lo, hi)` exactly when every covering branch
    /// carries the given slope and intercept.
    pub(crate) fn agrees_with_affine(&self, lo: T, hi: T, slope: T, intercept: T) -> bool {
        if lo >= hi {
            return true;
        }
        self.pieces
            .iter()
            .filter(|p| p.lo < hi && lo < p.hi)
            .all(|p| p.slope == slope && p.intercept == intercept)
    }
}
