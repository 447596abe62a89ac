//! Finite extended metric spaces and the elementary operations on them.

use std::fmt;

use crate::error::{Error, Result, Violation};
use crate::ext::ExtReal;
use crate::scalar::Scalar;

/// A finite extended metric space stored as a dense symmetric matrix.
///
/// Points are never at mutual distance zero; callers must deduplicate.
#[derive(Clone, PartialEq)]
pub struct FiniteSpace<T> {
    n: usize,
    d: Vec<ExtReal<T>>,
    label: Option<String>,
}

/// Relative slack used when checking the triangle inequality.
fn triangle_slack<T: Scalar>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(8.0))
}

/// Checks every metric invariant of a raw matrix and lists all violations.
pub fn validate<T: Scalar>(rows: &[Vec<ExtReal<T>>]) -> Result<FiniteSpace<T>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut bad = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            bad.push(Violation::NotSquare { row: i, len: row.len(), n });
        }
    }
    if !bad.is_empty() {
        return Err(Error::Invalid(bad));
    }
    let at = |i: usize, j: usize| rows[i][j];
    for i in 0..n {
        if at(i, i) != ExtReal::zero() {
            bad.push(Violation::NonzeroDiagonal(i));
        }
        for j in 0..n {
            if let ExtReal::Finite(v) = at(i, j) {
                if v.is_nan() || v < T::zero() || v.is_infinite() {
                    bad.push(Violation::NegativeEntry(i, j));
                }
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if at(i, j) != at(j, i) {
                bad.push(Violation::Asymmetric(i, j));
            }
            if at(i, j) == ExtReal::zero() {
                bad.push(Violation::DuplicatePoint(i, j));
            }
        }
    }
    let slack = triangle_slack::<T>();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let via = at(i, k) + at(k, j);
                let direct = at(i, j);
                let ok = match (direct, via) {
                    (_, ExtReal::Inf) => true,
                    (ExtReal::Inf, ExtReal::Finite(_)) => false,
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => a <= b + slack * b.max(T::one()),
                };
                if !ok {
                    bad.push(Violation::TriangleViolation(i, k, j));
                }
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::Invalid(bad));
    }
    let d = rows.iter().flat_map(|r| r.iter().copied()).collect();
    Ok(FiniteSpace { n, d, label: None })
}

impl<T: Scalar> FiniteSpace<T> {
    pub fn from_rows(rows: &[Vec<ExtReal<T>>]) -> Result<Self> {
        validate(rows)
    }

    /// Builds a space from a finite-valued matrix.
    pub fn from_finite(rows: &[Vec<T>]) -> Result<Self> {
        let ext: Vec<Vec<ExtReal<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| ExtReal::from(v)).collect())
            .collect();
        validate(&ext)
    }

    /// Builds a space from a symmetric distance function on `0..n`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> ExtReal<T>) -> Result<Self> {
        let rows: Vec<Vec<ExtReal<T>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { ExtReal::zero() } else { f(i.min(j), i.max(j)) })
                    .collect()
            })
            .collect();
        validate(&rows)
    }

    /// Construction without validation, for matrices valid by construction.
    pub(crate) fn from_raw(n: usize, d: Vec<ExtReal<T>>) -> Self {
        debug_assert_eq!(d.len(), n * n);
        FiniteSpace { n, d, label: None }
    }

    pub fn single_point() -> Self {
        FiniteSpace { n: 1, d: vec![ExtReal::zero()], label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false: a space has at least one point.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> ExtReal<T> {
        self.d[i * self.n + j]
    }

    /// Distance as a float, `INF` mapped to float infinity.
    #[inline]
    pub fn df(&self, i: usize, j: usize) -> T {
        self.d[i * self.n + j].to_float()
    }

    pub fn rows(&self) -> Vec<Vec<ExtReal<T>>> {
        (0..self.n).map(|i| self.d[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.d.iter().all(|v| v.is_finite())
    }

    pub fn require_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InfiniteEntry)
        }
    }

    /// `X ∧ D`: every distance capped at the positive real `cap`.
    pub fn truncate(&self, cap: T) -> Self {
        assert!(cap > T::zero(), "truncation cap must be positive");
        let d = self.d.iter().map(|v| ExtReal::Finite(v.cap(cap))).collect();
        FiniteSpace { n: self.n, d, label: self.label.clone() }
    }

    /// `tX`: every distance multiplied by `t > 0`.
    pub fn scale(&self, t: T) -> Self {
        assert!(t > T::zero(), "scale factor must be positive");
        let d = self.d.iter().map(|v| v.scaled(t)).collect();
        FiniteSpace { n: self.n, d, label: self.label.clone() }
    }

    /// The subspace on the given distinct indices, in the given order.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        assert!(m > 0, "restriction to an empty index set");
        let mut d = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                d.push(self.d(i, j));
            }
        }
        FiniteSpace { n: m, d, label: None }
    }

    /// Relabels points: point `i` of the result is point `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = self.restrict(perm);
        out.label = self.label.clone();
        out
    }

    pub fn row_max(&self, i: usize) -> ExtReal<T> {
        (0..self.n).map(|j| self.d(i, j)).fold(ExtReal::zero(), ExtReal::max)
    }

    pub fn diameter(&self) -> ExtReal<T> {
        self.d.iter().copied().fold(ExtReal::zero(), ExtReal::max)
    }

    /// Least positive distance, `None` for a single point.
    pub fn separation(&self) -> Option<ExtReal<T>> {
        let mut best: Option<ExtReal<T>> = None;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let v = self.d(i, j);
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        best
    }

    /// Merges points at zero distance of a pseudometric given as a
    /// finite matrix; returns the quotient space.
    pub(crate) fn from_pseudo(n: usize, d: &[T], zero_tol: T) -> Self {
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..n {
            if keep.iter().all(|&k| d[k * n + i] > zero_tol) {
                keep.push(i);
            }
        }
        let m = keep.len();
        let mut out = Vec::with_capacity(m * m);
        for &i in &keep {
            for &j in &keep {
                out.push(ExtReal::Finite(if i == j { T::zero() } else { d[i * n + j] }));
            }
        }
        FiniteSpace::from_raw(m, out)
    }

    /// Lossless reinterpretation in another scalar type where possible.
    pub fn cast<U: Scalar>(&self) -> FiniteSpace<U> {
        let d = self
            .d
            .iter()
            .map(|v| match v {
                ExtReal::Finite(x) => ExtReal::Finite(U::lit(x.to_f64_lossy())),
                ExtReal::Inf => ExtReal::Inf,
            })
            .collect();
        FiniteSpace { n: self.n, d, label: self.label.clone() }
    }
}

impl<T: Scalar> fmt::Debug for FiniteSpace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteSpace")?;
        if let Some(l) = &self.label {
            write!(f, "({l})")?;
        }
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.d(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// A finite space with a distinguished basepoint.
#[derive(Clone, PartialEq)]
pub struct PointedSpace<T> {
    pub space: FiniteSpace<T>,
    base: usize,
}

impl<T: Scalar> fmt::Debug for PointedSpace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pointed(base {}, {:?})", self.base, self.space)
    }
}

impl<T: Scalar> PointedSpace<T> {
    pub fn new(space: FiniteSpace<T>, base: usize) -> Result<Self> {
        if base >= space.len() {
            return Err(Error::BadBase { base, n: space.len() });
        }
        Ok(Self { space, base })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `sup_x d(base, x)`.
    pub fn radius(&self) -> ExtReal<T> {
        self.space.row_max(self.base)
    }

    /// The closed ball `B(base, r)` with the restricted metric.
    pub fn ball(&self, r: T) -> Self {
        assert!(r > T::zero(), "ball radius must be positive");
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| self.space.d(self.base, i) <= ExtReal::Finite(r))
            .collect();
        let base = idx.iter().position(|&i| i == self.base).expect("base lies in its ball");
        Self { space: self.space.restrict(&idx), base }
    }

    pub fn truncate(&self, cap: T) -> Self {
        Self { space: self.space.truncate(cap), base: self.base }
    }

    pub fn scale(&self, t: T) -> Self {
        Self { space: self.space.scale(t), base: self.base }
    }

    /// Reorders points so the base becomes index 0.
    pub fn base_first(&self) -> Self {
        let mut perm: Vec<usize> = vec![self.base];
        perm.extend((0..self.len()).filter(|&i| i != self.base));
        Self { space: self.space.permute(&perm), base: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(rows: &[&[f64]]) -> Result<FiniteSpace<f64>> {
        let v: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        FiniteSpace::from_finite(&v)
    }

    fn sigma(n: usize, d: f64) -> FiniteSpace<f64> {
        FiniteSpace::from_fn(n, |_, _| ExtReal::Finite(d)).unwrap()
    }

    #[test]
    fn two_points_valid() {
        let x = sp(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.diameter(), ExtReal::Finite(1.0));
    }

    #[test]
    fn triangle_violation_reported() {
        let err = sp(&[&[0.0, 1.0, 3.0], &[1.0, 0.0, 1.0], &[3.0, 1.0, 0.0]]).unwrap_err();
        match err {
            Error::Invalid(v) => assert_eq!(v, vec![Violation::TriangleViolation(0, 1, 2)]),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn every_violation_listed() {
        let err = sp(&[&[1.0, 2.0, 0.0], &[1.0, 0.0, -1.0], &[0.0, -1.0, 0.0]]).unwrap_err();
        let Error::Invalid(v) = err else { panic!() };
        assert!(v.contains(&Violation::NonzeroDiagonal(0)));
        assert!(v.contains(&Violation::Asymmetric(0, 1)));
        assert!(v.contains(&Violation::NegativeEntry(1, 2)));
        assert!(v.contains(&Violation::DuplicatePoint(0, 2)));
    }

    #[test]
    fn not_square() {
        let rows = vec![vec![ExtReal::zero(), ExtReal::Finite(1.0)], vec![ExtReal::zero()]];
        assert!(matches!(validate::<f64>(&rows), Err(Error::Invalid(_))));
    }

    #[test]
    fn extended_two_points() {
        let rows = vec![vec![ExtReal::zero(), ExtReal::INF], vec![ExtReal::INF, ExtReal::zero()]];
        let x = validate::<f64>(&rows).unwrap();
        assert!(!x.is_finite());
        assert_eq!(x.truncate(1.0), sigma(2, 1.0));
    }

    #[test]
    fn truncate_and_scale() {
        assert_eq!(sigma(3, 5.0).truncate(2.0), sigma(3, 2.0));
        let x = sp(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.5], &[2.0, 1.5, 0.0]]).unwrap();
        assert_eq!(x.truncate(2.0), x);
        assert_eq!(sigma(2, 1.0).scale(2.0), sigma(2, 2.0));
        assert_eq!(x.scale(1.0), x);
        let back = x.scale(4.0).scale(0.25);
        for i in 0..3 {
            for j in 0..3 {
                assert!((back.df(i, j) - x.df(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn balls_and_radius() {
        // 3-leg spider of leg length 1 with one interior node per leg:
        // center 0, mids 1..=3, tips 4..=6.
        let x = FiniteSpace::from_fn(7, |i, j| {
            let leg = |p: usize| if p == 0 { None } else { Some((p - 1) % 3) };
            let h = |p: usize| match p {
                0 => 0.0_f64,
                1..=3 => 0.5,
                _ => 1.0,
            };
            let v = if leg(i).is_some() && leg(i) == leg(j) {
                (h(i) - h(j)).abs()
            } else {
                h(i) + h(j)
            };
            ExtReal::Finite(v)
        })
        .unwrap();
        let p = PointedSpace::new(x, 0).unwrap();
        assert_eq!(p.radius(), ExtReal::Finite(1.0));
        assert_eq!(p.space.diameter(), ExtReal::Finite(2.0));
        let b = p.ball(0.5);
        assert_eq!(b.len(), 4);
        assert_eq!(b.base(), 0);
        assert_eq!(p.ball(1.0).len(), 7);
        assert_eq!(p.ball(0.1).len(), 1);
    }

    #[test]
    fn single_point_radius() {
        let p = PointedSpace::new(FiniteSpace::<f64>::single_point(), 0).unwrap();
        assert_eq!(p.radius(), ExtReal::zero());
        assert_eq!(p.space.diameter(), ExtReal::zero());
        assert!(PointedSpace::new(FiniteSpace::<f64>::single_point(), 1).is_err());
    }

    #[test]
    fn pseudo_quotient() {
        let d = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let q = FiniteSpace::from_pseudo(3, &d, 1e-12);
        assert_eq!(q, sigma(2, 1.0));
    }

    #[test]
    fn works_in_f32() {
        let x = FiniteSpace::<f32>::from_fn(3, |_, _| ExtReal::Finite(1.0)).unwrap();
        assert_eq!(x.truncate(0.5).diameter(), ExtReal::Finite(0.5));
    }
}
