use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A closed interval `[lo, hi]` certifying a real quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    /// Panics when `lo > hi` or either end is not finite.
    pub fn new(lo: T, hi: T) -> Self {
        assert!(lo.is_finite() && hi.is_finite(), "interval ends must be finite");
        assert!(lo <= hi, "interval with lo {lo} > hi {hi}");
        Self { lo, hi }
    }

    pub fn point(v: T) -> Self {
        Self::new(v, v)
    }

    /// A point value padded by a few ulps of rounding slack.
    pub fn rounded(v: T) -> Self {
        let pad = T::epsilon() * T::lit(16.0) * v.abs().max(T::one());
        Self::new(v - pad, v + pad)
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn mid(&self) -> T {
        (self.lo + self.hi) / T::lit(2.0)
    }

    pub fn contains(&self, v: T) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Containment with an absolute tolerance on both sides.
    pub fn contains_tol(&self, v: T, tol: T) -> bool {
        self.lo - tol <= v && v <= self.hi + tol
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn widen(&self, by: T) -> Self {
        Self::new(self.lo - by, self.hi + by)
    }

    pub fn max(&self, other: &Self) -> Self {
        Self::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    pub fn min(&self, other: &Self) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    pub fn scale(&self, t: T) -> Self {
        assert!(t >= T::zero());
        Self::new(self.lo * t, self.hi * t)
    }

    pub fn clamp(&self, lo: T, hi: T) -> Self {
        let l = self.lo.max(lo).min(hi);
        let h = self.hi.min(hi).max(l);
        Self::new(l, h)
    }
}

impl<T: Scalar> std::ops::Add for Interval<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl<T: Scalar> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = Interval::new(0.0, 1.0);
        let b = Interval::new(0.5, 2.0);
        assert_eq!(a.max(&b), Interval::new(0.5, 2.0));
        assert_eq!(a + b, Interval::new(0.5, 3.0));
        assert!(Interval::point(0.5).is_subset_of(&a));
        assert!(Interval::rounded(0.25).contains(0.25));
        assert_eq!(Interval::new(-1.0, 3.0).clamp(0.0, 2.0), Interval::new(0.0, 2.0));
    }

    #[test]
    #[should_panic]
    fn rejects_inverted() {
        let _ = Interval::new(1.0, 0.0);
    }
}
