//! The preorder `X ≾ Y` on finite spaces and the widening defect.
//!
//! `Y` is ε-wider than `X` when some map `f: X -> Y` satisfies
//! `d_X(x,x') <= d_Y(f x, f x') + ε`. The widening defect is the least such
//! ε; for finite spaces `X ≾ Y` holds exactly when the defect is zero.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::metric::{FiniteSpace, PointedSpace};
use crate::scalar::Scalar;
use crate::search::{twin_links, Item, Problem};

/// Default tolerance absorbing floating point rounding in order tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default node limit for exact searches.
pub const DEFAULT_LIMIT: u64 = 20_000_000;

/// A total map from the points of one space to the points of another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMap {
    pub assignment: Vec<usize>,
}

impl PointMap {
    /// The defect realized by this map.
    pub fn defect<T: Scalar>(&self, x: &FiniteSpace<T>, y: &FiniteSpace<T>) -> ExtReal<T> {
        let f = &self.assignment;
        let mut worst = ExtReal::zero();
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                worst = worst.max(x.d(i, j).excess_over(y.d(f[i], f[j])));
            }
        }
        worst
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &PointMap) -> PointMap {
        PointMap { assignment: self.assignment.iter().map(|&i| g.assignment[i]).collect() }
    }
}

#[derive(Clone, Debug)]
pub struct DefectResult<T> {
    pub defect: ExtReal<T>,
    pub witness: PointMap,
}

/// Defect bounds from a possibly truncated search.
#[derive(Clone, Debug)]
pub struct DefectBounds<T> {
    pub lower: ExtReal<T>,
    pub upper: ExtReal<T>,
    pub witness: PointMap,
    pub exact: bool,
}

fn defect_problem<'a, T: Scalar>(
    x: &'a FiniteSpace<T>,
    y: &'a FiniteSpace<T>,
    fixed: Option<(usize, usize)>,
) -> (Vec<usize>, Problem<impl Fn(Item, Item) -> ExtReal<T> + 'a>) {
    // Most constrained points first; a fixed (base) point leads.
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |i: usize| (fixed.map(|f| f.0) != Some(i), i);
        let ra = x.row_max(a);
        let rb = x.row_max(b);
        key(a)
            .0
            .cmp(&key(b).0)
            .then(rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.cmp(&b))
    });
    let frozen: Vec<usize> = fixed.map(|f| vec![f.0]).unwrap_or_default();
    let ordered_after = twin_links(|i, j| x.d(i, j), x.len(), &order, &frozen);
    let candidates = order
        .iter()
        .map(|&i| match fixed {
            Some((bx, by)) if bx == i => vec![(i, by)],
            _ => (0..y.len()).map(|j| (i, j)).collect(),
        })
        .collect();
    let cost = move |a: Item, b: Item| x.d(a.0, b.0).excess_over(y.d(a.1, b.1));
    (order, Problem { candidates, ordered_after, cost })
}

fn run<T: Scalar>(
    x: &FiniteSpace<T>,
    y: &FiniteSpace<T>,
    fixed: Option<(usize, usize)>,
    budget: u64,
) -> DefectBounds<T> {
    let (order, problem) = defect_problem(x, y, fixed);
    let greedy = problem.greedy();
    let out = problem.solve(greedy, budget);
    let mut assignment = vec![0; x.len()];
    for (v, &c) in out.choice.iter().enumerate() {
        let (i, j) = problem.candidates[v][c];
        debug_assert_eq!(i, order[v]);
        assignment[i] = j;
    }
    DefectBounds {
        lower: out.lower,
        upper: out.best,
        witness: PointMap { assignment },
        exact: out.exact,
    }
}

/// Defect bounds within a node budget; exact when `exact` is set.
pub fn widening_defect_bounded<T: Scalar>(
    x: &FiniteSpace<T>,
    y: &FiniteSpace<T>,
    budget: u64,
) -> DefectBounds<T> {
    run(x, y, None, budget)
}

/// Least ε such that `y` is ε-wider than `x`, with a witness map.
pub fn widening_defect<T: Scalar>(
    x: &FiniteSpace<T>,
    y: &FiniteSpace<T>,
    limit: u64,
) -> Result<DefectResult<T>> {
    let b = run(x, y, None, limit);
    if !b.exact {
        return Err(Error::SizeLimitExceeded { limit });
    }
    Ok(DefectResult { defect: b.upper, witness: b.witness })
}

/// Defect bounds over base-preserving maps only.
pub fn pointed_defect_bounded<T: Scalar>(
    x: &PointedSpace<T>,
    y: &PointedSpace<T>,
    budget: u64,
) -> DefectBounds<T> {
    run(&x.space, &y.space, Some((x.base(), y.base())), budget)
}

pub fn pointed_defect<T: Scalar>(
    x: &PointedSpace<T>,
    y: &PointedSpace<T>,
    limit: u64,
) -> Result<DefectResult<T>> {
    let b = pointed_defect_bounded(x, y, limit);
    if !b.exact {
        return Err(Error::SizeLimitExceeded { limit });
    }
    Ok(DefectResult { defect: b.upper, witness: b.witness })
}

fn within<T: Scalar>(defect: ExtReal<T>, tol: T) -> bool {
    defect <= ExtReal::Finite(tol)
}

/// `X ≾ Y` up to `tol`.
pub fn precsim<T: Scalar>(x: &FiniteSpace<T>, y: &FiniteSpace<T>, tol: T) -> Result<bool> {
    let b = run(x, y, None, DEFAULT_LIMIT);
    if within(b.upper, tol) {
        return Ok(true);
    }
    if !within(b.lower, tol) {
        return Ok(false);
    }
    Err(Error::SizeLimitExceeded { limit: DEFAULT_LIMIT })
}

/// `(X,x₀) ≾ (Y,y₀)` up to `tol`: maps must send base to base.
pub fn precsim_pointed<T: Scalar>(x: &PointedSpace<T>, y: &PointedSpace<T>, tol: T) -> Result<bool> {
    let b = pointed_defect_bounded(x, y, DEFAULT_LIMIT);
    if within(b.upper, tol) {
        return Ok(true);
    }
    if !within(b.lower, tol) {
        return Ok(false);
    }
    Err(Error::SizeLimitExceeded { limit: DEFAULT_LIMIT })
}

/// `X ∼ Y`: both directions of `≾` hold.
pub fn equivalent<T: Scalar>(x: &FiniteSpace<T>, y: &FiniteSpace<T>, tol: T) -> Result<bool> {
    Ok(precsim(x, y, tol)? && precsim(y, x, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(n: usize, d: f64) -> FiniteSpace<f64> {
        FiniteSpace::from_fn(n, |_, _| ExtReal::Finite(d)).unwrap()
    }

    /// Exhaustive minimum over all |Y|^|X| maps.
    fn brute(x: &FiniteSpace<f64>, y: &FiniteSpace<f64>) -> ExtReal<f64> {
        let (n, m) = (x.len(), y.len());
        let total = m.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let assignment = (0..n)
                    .map(|_| {
                        let v = code % m;
                        code /= m;
                        v
                    })
                    .collect();
                PointMap { assignment }.defect(x, y)
            })
            .fold(ExtReal::INF, ExtReal::min)
    }

    #[test]
    fn subspace_inject() {
        let r = widening_defect(&sigma(2, 1.0), &sigma(3, 1.0), DEFAULT_LIMIT).unwrap();
        assert_eq!(r.defect, ExtReal::zero());
    }

    #[test]
    fn pigeonhole_collapse() {
        let (x, y) = (sigma(3, 1.0), sigma(2, 1.0));
        assert_eq!(brute(&x, &y), ExtReal::Finite(1.0));
        let r = widening_defect(&x, &y, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.defect, ExtReal::Finite(1.0));
        assert_eq!(r.witness.defect(&x, &y), r.defect);
        assert!(!precsim(&x, &y, 1e-9).unwrap());
    }

    #[test]
    fn shrinking_distance() {
        let r = widening_defect(&sigma(2, 2.0), &sigma(2, 1.0), DEFAULT_LIMIT).unwrap();
        assert_eq!(r.defect, ExtReal::Finite(1.0));
    }

    #[test]
    fn infinite_requirements() {
        let inf2 = validate_inf2();
        let r = widening_defect(&inf2, &sigma(3, 5.0), DEFAULT_LIMIT).unwrap();
        assert_eq!(r.defect, ExtReal::INF);
        let r = widening_defect(&inf2, &inf2, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.defect, ExtReal::zero());
        let r = widening_defect(&sigma(3, 5.0), &inf2, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.defect, ExtReal::Finite(5.0));
    }

    fn validate_inf2() -> FiniteSpace<f64> {
        FiniteSpace::from_fn(2, |_, _| ExtReal::INF).unwrap()
    }

    #[test]
    fn pointed_maps_fix_base() {
        // Σ₂(2) pointed at 0 into Σ₂(1) pointed at 0: only base-fixing maps.
        let x = PointedSpace::new(sigma(2, 2.0), 0).unwrap();
        let y = PointedSpace::new(sigma(2, 1.0), 0).unwrap();
        assert!(!precsim_pointed(&x, &y, 0.0).unwrap());
        // Two points at distance 1 into a 2-leg spider (a path of length 2)
        // pointed at a tip.
        let path = FiniteSpace::from_fn(3, |i, j| ExtReal::Finite((j - i) as f64)).unwrap();
        let y = PointedSpace::new(path, 0).unwrap();
        let x = PointedSpace::new(sigma(2, 1.0), 0).unwrap();
        assert!(precsim_pointed(&x, &y, 0.0).unwrap());
        let r = pointed_defect(&x, &y, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.witness.assignment[0], 0);
    }

    #[test]
    fn equivalence() {
        let x = FiniteSpace::from_finite(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.5],
            vec![2.0, 1.5, 0.0],
        ])
        .unwrap();
        assert!(equivalent(&x, &x.permute(&[2, 0, 1]), 1e-9).unwrap());
        assert!(!equivalent(&sigma(2, 1.0), &sigma(3, 1.0), 1e-9).unwrap());
        assert!(precsim(&x.truncate(1.2), &x, 0.0).unwrap());
    }

    #[test]
    fn twins_do_not_change_the_optimum() {
        // Σ₅ into a path: heavy twin symmetry in the domain.
        let x = sigma(5, 2.0);
        let y = FiniteSpace::from_fn(6, |i, j| ExtReal::Finite((j - i) as f64 * 0.5)).unwrap();
        let r = widening_defect(&x, &y, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.defect, brute(&x, &y));
    }
}
