//! Extended nonnegative reals `[0, +inf]` with total arithmetic.
//!
//! Conventions: `a + INF = INF`, `a ∧ INF = a`, `|INF - INF| = 0` and
//! `|INF - a| = INF` for finite `a`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal<T> {
    Finite(T),
    Inf,
}

impl<T: Scalar> ExtReal<T> {
    pub const INF: Self = ExtReal::Inf;

    pub fn zero() -> Self {
        ExtReal::Finite(T::zero())
    }

    pub fn finite(v: T) -> Self {
        ExtReal::Finite(v)
    }

    pub fn is_inf(self) -> bool {
        matches!(self, ExtReal::Inf)
    }

    pub fn is_finite(self) -> bool {
        !self.is_inf()
    }

    /// The finite value, or `None` for `INF`.
    pub fn value(self) -> Option<T> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Inf => None,
        }
    }

    /// Finite value, mapping `INF` to the float infinity.
    pub fn to_float(self) -> T {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Inf => T::infinity(),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// `self ∧ d` for a finite cap.
    pub fn cap(self, d: T) -> T {
        match self {
            ExtReal::Finite(v) => v.min(d),
            ExtReal::Inf => d,
        }
    }

    /// `|self - other|` under the extended conventions.
    pub fn abs_diff(self, other: Self) -> Self {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite((a - b).abs()),
            (ExtReal::Inf, ExtReal::Inf) => ExtReal::zero(),
            _ => ExtReal::Inf,
        }
    }

    /// `(self - other)⁺`, the amount by which `self` exceeds `other`.
    ///
    /// `INF` exceeds every finite value by `INF`; nothing exceeds `INF`.
    pub fn excess_over(self, other: Self) -> Self {
        match (self, other) {
            (_, ExtReal::Inf) => ExtReal::zero(),
            (ExtReal::Inf, ExtReal::Finite(_)) => ExtReal::Inf,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite((a - b).max(T::zero())),
        }
    }

    /// `t · self` for `t > 0`, with `t · INF = INF`.
    pub fn scaled(self, t: T) -> Self {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * t),
            ExtReal::Inf => ExtReal::Inf,
        }
    }
}

impl<T: Scalar> Add for ExtReal<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Inf,
        }
    }
}

impl<T: Scalar> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Inf, ExtReal::Inf) => Some(Ordering::Equal),
            (ExtReal::Inf, _) => Some(Ordering::Greater),
            (_, ExtReal::Inf) => Some(Ordering::Less),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<T: Scalar> From<T> for ExtReal<T> {
    fn from(v: T) -> Self {
        if v.is_infinite() && v > T::zero() {
            ExtReal::Inf
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl<T: Scalar> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Inf => f.write_str("inf"),
        }
    }
}

/// JSON form: a number, or the string `"inf"`.
impl<T: Scalar> serde::Serialize for ExtReal<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(v.to_f64_lossy()),
            ExtReal::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de, T: Scalar> serde::Deserialize<'de> for ExtReal<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() => Ok(ExtReal::Finite(T::lit(v))),
            Raw::Text(t) if t.eq_ignore_ascii_case("inf") => Ok(ExtReal::Inf),
            _ => Err(serde::de::Error::custom("expected a finite number or \"inf\"")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = ExtReal<f64>;

    #[test]
    fn json_round_trip() {
        let v: Vec<E> = serde_json::from_str(r#"[1.5, "inf", 0]"#).unwrap();
        assert_eq!(v, vec![E::finite(1.5), E::INF, E::zero()]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[1.5,"inf",0.0]"#);
        assert!(serde_json::from_str::<E>(r#""nan""#).is_err());
    }

    #[test]
    fn conventions() {
        let a = E::finite(2.0);
        assert_eq!(a + E::INF, E::INF);
        assert_eq!(a.min(E::INF), a);
        assert_eq!(E::INF.abs_diff(E::INF), E::zero());
        assert_eq!(E::INF.abs_diff(a), E::INF);
        assert_eq!(a.abs_diff(E::finite(5.0)), E::finite(3.0));
        assert_eq!(E::INF.cap(1.5), 1.5);
    }

    #[test]
    fn excess() {
        assert_eq!(E::INF.excess_over(E::finite(1.0)), E::INF);
        assert_eq!(E::finite(1.0).excess_over(E::INF), E::zero());
        assert_eq!(E::INF.excess_over(E::INF), E::zero());
        assert_eq!(E::finite(1.0).excess_over(E::finite(3.0)), E::zero());
        assert_eq!(E::finite(3.0).excess_over(E::finite(1.0)), E::finite(2.0));
    }

    #[test]
    fn ordering() {
        assert!(E::INF > E::finite(1e300));
        assert!(E::finite(1.0) < E::finite(2.0));
        assert_eq!(E::from(f64::INFINITY), E::INF);
    }
}
