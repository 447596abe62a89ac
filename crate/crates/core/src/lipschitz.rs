//! Sup-norm coordinates: the Kuratowski embedding, the 1-Lipschitz repair of
//! maps that are 1-Lipschitz up to ε, and the slice transfer built on them.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::metric::FiniteSpace;
use crate::order::{widening_defect, DEFAULT_LIMIT};
use crate::scalar::Scalar;

/// Images of the points of a space in `(R^N, ‖·‖∞)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateMap<T> {
    pub values: Vec<Vec<T>>,
}

impl<T: Scalar> CoordinateMap<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn sup_dist(&self, i: usize, j: usize) -> T {
        self.values[i]
            .iter()
            .zip(&self.values[j])
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// `max_i ‖self(i) - other(i)‖∞`.
    pub fn sup_gap(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(&u, &v)| (u - v).abs()))
            .fold(T::zero(), T::max)
    }

    /// Smallest ε with `‖f(i) - f(j)‖∞ <= d(i,j) + ε` for all pairs.
    pub fn lipschitz_excess(&self, d: impl Fn(usize, usize) -> T) -> T {
        let mut worst = T::zero();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                worst = worst.max(self.sup_dist(i, j) - d(i, j));
            }
        }
        worst
    }
}

/// `i ↦ (d(i,0), …, d(i,n-1))`, an isometry into the sup norm.
pub fn kuratowski<T: Scalar>(x: &FiniteSpace<T>) -> Result<CoordinateMap<T>> {
    x.require_finite()?;
    let values = (0..x.len()).map(|i| (0..x.len()).map(|j| x.df(i, j)).collect()).collect();
    Ok(CoordinateMap { values })
}

fn lower_envelope<T: Scalar>(n: usize, d: &impl Fn(usize, usize) -> T, f: &CoordinateMap<T>) -> CoordinateMap<T> {
    let dim = f.dim();
    let values = (0..n)
        .map(|i| {
            (0..dim)
                .map(|c| (0..n).map(|k| f.values[k][c] + d(i, k)).fold(T::infinity(), T::min))
                .collect()
        })
        .collect();
    CoordinateMap { values }
}

fn upper_envelope<T: Scalar>(n: usize, d: &impl Fn(usize, usize) -> T, f: &CoordinateMap<T>) -> CoordinateMap<T> {
    let dim = f.dim();
    let values = (0..n)
        .map(|i| {
            (0..dim)
                .map(|c| (0..n).map(|k| f.values[k][c] - d(i, k)).fold(T::neg_infinity(), T::max))
                .collect()
        })
        .collect();
    CoordinateMap { values }
}

fn check_precondition<T: Scalar>(
    f: &CoordinateMap<T>,
    d: &impl Fn(usize, usize) -> T,
    eps: T,
) -> Result<()> {
    let excess = f.lipschitz_excess(d);
    let slack = T::lit(1e-9) * T::one().max(eps);
    if excess > eps + slack {
        return Err(Error::PreconditionViolated(format!(
            "map is 1-Lipschitz only up to {excess}, not {eps}"
        )));
    }
    Ok(())
}

/// Repairs a map that is 1-Lipschitz up to `eps` into a 1-Lipschitz map
/// within `eps` of it, coordinatewise `f̃_c(i) = min_k f_c(k) + d(i,k)`.
pub fn mcshane_fix<T: Scalar>(x: &FiniteSpace<T>, f: &CoordinateMap<T>, eps: T) -> Result<CoordinateMap<T>> {
    x.require_finite()?;
    if f.len() != x.len() {
        return Err(Error::PreconditionViolated("map and space sizes differ".into()));
    }
    let d = |i: usize, j: usize| x.df(i, j);
    check_precondition(f, &d, eps)?;
    Ok(lower_envelope(x.len(), &d, f))
}

/// Midpoint of the lower and upper McShane envelopes: still 1-Lipschitz and
/// within `eps / 2` of `f`.
pub fn mcshane_midpoint<T: Scalar>(
    x: &FiniteSpace<T>,
    f: &CoordinateMap<T>,
    eps: T,
) -> Result<CoordinateMap<T>> {
    x.require_finite()?;
    let d = |i: usize, j: usize| x.df(i, j);
    check_precondition(f, &d, eps)?;
    Ok(midpoint_envelope(x.len(), &d, f))
}

fn midpoint_envelope<T: Scalar>(
    n: usize,
    d: &impl Fn(usize, usize) -> T,
    f: &CoordinateMap<T>,
) -> CoordinateMap<T> {
    let lo = lower_envelope(n, d, f);
    let hi = upper_envelope(n, d, f);
    let two = T::lit(2.0);
    let values = lo
        .values
        .iter()
        .zip(&hi.values)
        .map(|(a, b)| a.iter().zip(b).map(|(&u, &v)| (u + v) / two).collect())
        .collect();
    CoordinateMap { values }
}

/// Pulls `yp` into `x` along a least-defect map, repairs the Kuratowski
/// coordinates over the pulled-back pseudometric and returns the image,
/// zero-distance points merged.
fn pull_back<T: Scalar>(
    yp: &FiniteSpace<T>,
    x: &FiniteSpace<T>,
    eps_bound: Option<T>,
    midpoint: bool,
) -> Result<(FiniteSpace<T>, T)> {
    yp.require_finite()?;
    let res = widening_defect(yp, x, DEFAULT_LIMIT)?;
    let defect = res.defect.value().ok_or_else(|| {
        Error::PreconditionViolated("no map dominates an infinite distance".into())
    })?;
    if let Some(two_eps) = eps_bound {
        let slack = T::lit(1e-9) * T::one().max(two_eps);
        if defect > two_eps + slack {
            return Err(Error::PreconditionViolated(format!(
                "defect {defect} exceeds twice the tolerance"
            )));
        }
    }
    let g = &res.witness.assignment;
    let n = yp.len();
    let cap = yp.diameter().to_float() + defect;
    let pulled = |a: usize, b: usize| x.d(g[a], g[b]).cap(cap);
    let emb = kuratowski(yp)?;
    let fixed = if midpoint {
        midpoint_envelope(n, &pulled, &emb)
    } else {
        lower_envelope(n, &pulled, &emb)
    };
    let mut m = vec![T::zero(); n * n];
    for a in 0..n {
        for b in 0..n {
            m[a * n + b] = fixed.sup_dist(a, b);
        }
    }
    let tol = T::lit(1e-12) * T::one().max(cap);
    Ok((FiniteSpace::from_pseudo(n, &m, tol), defect))
}

/// Given `X` 2ε-wider than `Y'`, builds `X' ≾ X` on at most `|Y'|` points
/// with `d_GH(X', Y') <= 3ε` (via the lower McShane envelope), then caps
/// distances at `cap`. The distance bound needs `cap >= diam Y'`.
pub fn transfer_net<T: Scalar>(yp: &FiniteSpace<T>, x: &FiniteSpace<T>, eps: T, cap: T) -> Result<FiniteSpace<T>> {
    if eps < T::zero() || cap <= T::zero() {
        return Err(Error::InvalidParameter("eps must be >= 0 and cap > 0".into()));
    }
    let (out, _) = pull_back(yp, x, Some(eps * T::lit(2.0)), false)?;
    Ok(out.truncate(cap))
}

/// Midpoint variant of [`transfer_net`]: returns `X' ≾ X` with
/// `d_GH(X', Y') <= η/2`, where `η` is the widening defect of `Y'` into `X`
/// (also returned). Zero-distance points are merged.
pub fn transfer_midpoint<T: Scalar>(yp: &FiniteSpace<T>, x: &FiniteSpace<T>) -> Result<(FiniteSpace<T>, T)> {
    let (out, defect) = pull_back(yp, x, None, true)?;
    let cap = yp.diameter().to_float();
    let out = if cap > T::zero() { out.truncate(cap) } else { out };
    Ok((out, defect))
}

/// `true` when every coordinate difference is bounded by the distance.
pub fn is_one_lipschitz<T: Scalar>(x: &FiniteSpace<T>, f: &CoordinateMap<T>, tol: T) -> bool {
    (0..x.len()).all(|i| {
        (0..x.len()).all(|j| {
            let dij = x.d(i, j);
            f.values[i]
                .iter()
                .zip(&f.values[j])
                .all(|(&a, &b)| ExtReal::Finite((a - b).abs()) <= dij.max(ExtReal::zero()) + ExtReal::Finite(tol))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gh::gh_exact;

    fn sigma(n: usize, d: f64) -> FiniteSpace<f64> {
        FiniteSpace::from_fn(n, |_, _| ExtReal::Finite(d)).unwrap()
    }

    #[test]
    fn kuratowski_examples() {
        let e = kuratowski(&sigma(2, 1.0)).unwrap();
        assert_eq!(e.values, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(e.sup_dist(0, 1), 1.0);
        assert_eq!(kuratowski(&FiniteSpace::<f64>::single_point()).unwrap().values, vec![vec![0.0]]);
        let inf2 = FiniteSpace::<f64>::from_fn(2, |_, _| ExtReal::INF).unwrap();
        assert!(matches!(kuratowski(&inf2), Err(Error::InfiniteEntry)));
    }

    #[test]
    fn mcshane_examples() {
        let x = sigma(2, 1.0);
        let f = CoordinateMap { values: vec![vec![0.0], vec![1.3]] };
        let g = mcshane_fix(&x, &f, 0.3).unwrap();
        assert_eq!(g.values, vec![vec![0.0], vec![1.0]]);
        let lip = CoordinateMap { values: vec![vec![0.2], vec![0.9]] };
        assert_eq!(mcshane_fix(&x, &lip, 0.0).unwrap(), lip);
        assert!(matches!(mcshane_fix(&x, &f, 0.1), Err(Error::PreconditionViolated(_))));
        let mid = mcshane_midpoint(&x, &f, 0.3).unwrap();
        assert!(is_one_lipschitz(&x, &mid, 1e-12));
        assert!(mid.sup_gap(&f) <= 0.15 + 1e-12);
    }

    #[test]
    fn transfer_examples() {
        let yp = sigma(2, 1.0);
        let x = sigma(2, 1.5);
        let out = transfer_net(&yp, &x, 0.25, 1.0).unwrap();
        assert_eq!(out.len(), 2);
        assert!(gh_exact(&out, &yp, DEFAULT_LIMIT).unwrap().value.hi <= 0.75);
        let same = transfer_net(&yp, &yp.permute(&[1, 0]), 0.0, 1.0).unwrap();
        assert_eq!(gh_exact(&same, &yp, DEFAULT_LIMIT).unwrap().value.hi, 0.0);
        assert!(transfer_net(&sigma(3, 1.0), &sigma(2, 1.0), 0.1, 1.0).is_err());
    }

    #[test]
    fn midpoint_transfer_halves_the_defect() {
        let yp = sigma(3, 1.0);
        let x = sigma(2, 1.0);
        let (out, defect) = transfer_midpoint(&yp, &x).unwrap();
        assert_eq!(defect, 1.0);
        let gh = gh_exact(&out, &yp, DEFAULT_LIMIT).unwrap().value.hi;
        assert!(gh <= 0.5 + 1e-12, "gh {gh}");
        assert!(crate::order::precsim(&out, &x, 1e-9).unwrap());
    }
}
