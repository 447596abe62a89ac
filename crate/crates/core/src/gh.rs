//! Gromov–Hausdorff distance between finite spaces.
//!
//! `d_GH(X,Y) = ½ min_R dis R` over correspondences `R`. Every
//! correspondence contains one of the form `graph f ∪ graph gᵀ` with
//! `f: X -> Y`, `g: Y -> X`, and distortion is monotone under inclusion, so
//! the exact search branches over the pair of maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::interval::Interval;
use crate::metric::{FiniteSpace, PointedSpace};
use crate::order::widening_defect_bounded;
use crate::scalar::Scalar;
use crate::search::{twin_links, Item, Problem};

/// Default node budget for [`gh_bounds`].
pub const DEFAULT_BUDGET: u64 = 200_000;

/// A relation between the points of `X` and `Y`, surjective both ways.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn is_valid(&self, nx: usize, ny: usize) -> bool {
        let mut seen_x = vec![false; nx];
        let mut seen_y = vec![false; ny];
        for &(i, j) in &self.pairs {
            if i >= nx || j >= ny {
                return false;
            }
            seen_x[i] = true;
            seen_y[j] = true;
        }
        seen_x.iter().all(|&s| s) && seen_y.iter().all(|&s| s)
    }

    fn from_items(items: impl IntoIterator<Item = Item>) -> Self {
        let mut pairs: Vec<(usize, usize)> = items.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        Correspondence { pairs }
    }
}

/// `max |d_X(i,i') - d_Y(j,j')|` over pairs of related pairs.
pub fn distortion<T: Scalar>(x: &FiniteSpace<T>, y: &FiniteSpace<T>, c: &Correspondence) -> ExtReal<T> {
    let mut worst = ExtReal::zero();
    for (a, &(i, j)) in c.pairs.iter().enumerate() {
        for &(i2, j2) in &c.pairs[a + 1..] {
            worst = worst.max(x.d(i, i2).abs_diff(y.d(j, j2)));
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GhMethod {
    Exact,
    Bounded,
}

#[derive(Clone, Debug)]
pub struct GhResult<T> {
    pub value: Interval<T>,
    pub witness: Option<Correspondence>,
    pub method: GhMethod,
}

fn correspondence_problem<'a, T: Scalar>(
    x: &'a FiniteSpace<T>,
    y: &'a FiniteSpace<T>,
    base: Option<(usize, usize)>,
) -> Problem<impl Fn(Item, Item) -> ExtReal<T> + 'a> {
    let by_row_max = |s: &FiniteSpace<T>| {
        let mut o: Vec<usize> = (0..s.len()).collect();
        o.sort_by(|&a, &b| {
            s.row_max(b)
                .partial_cmp(&s.row_max(a))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        o
    };
    let xo = by_row_max(x);
    let yo = by_row_max(y);
    let mut candidates: Vec<Vec<Item>> = Vec::new();
    let mut ordered_after = Vec::new();
    let offset = usize::from(base.is_some());
    if let Some(b) = base {
        candidates.push(vec![b]);
        ordered_after.push(None);
    }
    let frozen: Vec<usize> = base.map(|b| vec![b.0]).unwrap_or_default();
    let links = twin_links(|i, j| x.d(i, j), x.len(), &xo, &frozen);
    for (pos, &i) in xo.iter().enumerate() {
        candidates.push((0..y.len()).map(|j| (i, j)).collect());
        ordered_after.push(links[pos].map(|p| p + offset));
    }
    for &j in &yo {
        candidates.push((0..x.len()).map(|i| (i, j)).collect());
        ordered_after.push(None);
    }
    let cost = move |a: Item, b: Item| x.d(a.0, b.0).abs_diff(y.d(a.1, b.1));
    Problem { candidates, ordered_after, cost }
}

fn chosen_items<F>(p: &Problem<F>, choice: &[usize]) -> Vec<Item> {
    choice.iter().enumerate().map(|(v, &c)| p.candidates[v][c]).collect()
}

fn half<T: Scalar>(v: ExtReal<T>) -> T {
    v.to_float() / T::lit(2.0)
}

fn exact_search<T: Scalar>(
    x: &FiniteSpace<T>,
    y: &FiniteSpace<T>,
    base: Option<(usize, usize)>,
    limit: u64,
) -> Result<GhResult<T>> {
    x.require_finite()?;
    y.require_finite()?;
    let p = correspondence_problem(x, y, base);
    let start = p.local_search(p.greedy(), 8);
    let lower = if base.is_none() { profile_lower_bound(x, y) } else { T::zero() };
    let out = if half(p.evaluate(&start)) <= lower {
        let best = p.evaluate(&start);
        crate::search::Outcome { best, choice: start, lower: best, exact: true }
    } else {
        p.solve(start, limit)
    };
    if !out.exact {
        return Err(Error::SizeLimitExceeded { limit });
    }
    let v = half(out.best);
    Ok(GhResult {
        value: Interval::point(v),
        witness: Some(Correspondence::from_items(chosen_items(&p, &out.choice))),
        method: GhMethod::Exact,
    })
}

/// Exact `d_GH` by branch and bound; errors when the node limit is hit.
pub fn gh_exact<T: Scalar>(x: &FiniteSpace<T>, y: &FiniteSpace<T>, limit: u64) -> Result<GhResult<T>> {
    exact_search(x, y, None, limit)
}

/// The pointed surrogate: half the least distortion over correspondences
/// containing the base pair.
pub fn gh_pointed<T: Scalar>(x: &PointedSpace<T>, y: &PointedSpace<T>, limit: u64) -> Result<GhResult<T>> {
    exact_search(&x.space, &y.space, Some((x.base(), y.base())), limit)
}

/// Hausdorff distance between two finite sets of reals (sorted inputs).
fn real_set_hausdorff<T: Scalar>(a: &[T], b: &[T]) -> T {
    let directed = |p: &[T], q: &[T]| {
        let mut worst = T::zero();
        let mut k = 0;
        for &v in p {
            while k + 1 < q.len() && q[k + 1] <= v {
                k += 1;
            }
            let mut near = (q[k] - v).abs();
            if k + 1 < q.len() {
                near = near.min((q[k + 1] - v).abs());
            }
            worst = worst.max(near);
        }
        worst
    };
    directed(a, b).max(directed(b, a))
}

/// Certified lower bound from distance profiles: for related `x ~ y` every
/// distance out of `x` is matched within `dis R` by one out of `y`.
pub fn profile_lower_bound<T: Scalar>(x: &FiniteSpace<T>, y: &FiniteSpace<T>) -> T {
    let rows = |s: &FiniteSpace<T>| -> Vec<Vec<T>> {
        (0..s.len())
            .map(|i| {
                let mut r: Vec<T> = (0..s.len()).map(|j| s.df(i, j)).collect();
                r.sort_by(|a, b| a.partial_cmp(b).unwrap());
                r.dedup();
                r
            })
            .collect()
    };
    let rx = rows(x);
    let ry = rows(y);
    let h: Vec<Vec<T>> = rx
        .iter()
        .map(|a| ry.iter().map(|b| real_set_hausdorff(a, b)).collect())
        .collect();
    let from_x = h
        .iter()
        .map(|r| r.iter().copied().fold(T::infinity(), T::min))
        .fold(T::zero(), T::max);
    let from_y = (0..ry.len())
        .map(|j| h.iter().map(|r| r[j]).fold(T::infinity(), T::min))
        .fold(T::zero(), T::max);
    let diam = x.diameter().abs_diff(y.diameter()).to_float();
    from_x.max(from_y).max(diam) / T::lit(2.0)
}

/// Greedy farthest-point subset of size `m`, seeded at a diameter endpoint.
pub(crate) fn farthest_points<T: Scalar>(s: &FiniteSpace<T>, m: usize) -> Vec<usize> {
    let n = s.len();
    let m = m.min(n);
    let mut start = 0;
    let mut far = T::lit(-1.0);
    for i in 0..n {
        let r = s.row_max(i).to_float();
        if r > far {
            far = r;
            start = i;
        }
    }
    let mut chosen = vec![start];
    let mut gap: Vec<T> = (0..n).map(|j| s.df(start, j)).collect();
    while chosen.len() < m {
        let (next, _) = gap
            .iter()
            .enumerate()
            .filter(|(j, _)| !chosen.contains(j))
            .fold((usize::MAX, T::lit(-1.0)), |acc, (j, &g)| if g > acc.1 { (j, g) } else { acc });
        chosen.push(next);
        for j in 0..n {
            gap[j] = gap[j].min(s.df(next, j));
        }
    }
    chosen
}

/// Lower bound `½ defect(Y', X)` over farthest-point subsets `Y' ⊆ Y`,
/// both directions: `X` is `2 d_GH`-wider than every subspace of `Y`.
pub fn packing_lower_bound<T: Scalar>(x: &FiniteSpace<T>, y: &FiniteSpace<T>, budget: u64) -> T {
    let one_way = |a: &FiniteSpace<T>, b: &FiniteSpace<T>| {
        let mut best = T::zero();
        for m in 2..=a.len().min(10) {
            let sub = a.restrict(&farthest_points(a, m));
            let bounds = widening_defect_bounded(&sub, b, budget);
            best = best.max(bounds.lower.to_float());
        }
        best
    };
    one_way(y, x).max(one_way(x, y)) / T::lit(2.0)
}

/// Certified interval for `d_GH` on larger instances.
pub fn gh_bounds<T: Scalar>(x: &FiniteSpace<T>, y: &FiniteSpace<T>, budget: u64) -> Result<GhResult<T>> {
    x.require_finite()?;
    y.require_finite()?;
    let p = correspondence_problem(x, y, None);
    let start = p.local_search(p.greedy(), 16);
    let mut hi = half(p.evaluate(&start));
    let mut lo = profile_lower_bound(x, y);
    let mut choice = start;
    let mut exact = false;
    if lo < hi {
        lo = lo.max(packing_lower_bound(x, y, budget / 10 + 1));
    }
    if lo < hi {
        let out = p.solve(choice.clone(), budget);
        choice = out.choice;
        hi = half(out.best);
        lo = lo.max(half(out.lower));
        exact = out.exact;
    }
    if lo >= hi {
        lo = hi;
        exact = true;
    }
    Ok(GhResult {
        value: Interval::new(lo, hi),
        witness: Some(Correspondence::from_items(chosen_items(&p, &choice))),
        method: if exact { GhMethod::Exact } else { GhMethod::Bounded },
    })
}

/// Hausdorff distance between two finite families under a pairwise
/// interval oracle: `max(sup_a inf_b, sup_b inf_a)`, enclosed by intervals.
pub fn hausdorff_between_sets<S, T: Scalar>(
    a: &[S],
    b: &[S],
    pairwise: impl Fn(&S, &S) -> Interval<T>,
) -> Result<Interval<T>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let table: Vec<Vec<Interval<T>>> = a.iter().map(|u| b.iter().map(|v| pairwise(u, v)).collect()).collect();
    let fold_min = |it: &mut dyn Iterator<Item = Interval<T>>| {
        it.fold(None, |acc: Option<Interval<T>>, v| Some(acc.map_or(v, |m| m.min(&v)))).unwrap()
    };
    let mut out: Option<Interval<T>> = None;
    for row in &table {
        let near = fold_min(&mut row.iter().copied());
        out = Some(out.map_or(near, |m| m.max(&near)));
    }
    for j in 0..b.len() {
        let near = fold_min(&mut table.iter().map(|r| r[j]));
        out = Some(out.map_or(near, |m| m.max(&near)));
    }
    Ok(out.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::DEFAULT_LIMIT;

    fn sigma(n: usize, d: f64) -> FiniteSpace<f64> {
        FiniteSpace::from_fn(n, |_, _| ExtReal::Finite(d)).unwrap()
    }

    fn exact(x: &FiniteSpace<f64>, y: &FiniteSpace<f64>) -> f64 {
        gh_exact(x, y, DEFAULT_LIMIT).unwrap().value.lo
    }

    #[test]
    fn distortion_examples() {
        let id = Correspondence { pairs: vec![(0, 0), (1, 1)] };
        assert_eq!(distortion(&sigma(2, 1.0), &sigma(2, 1.0), &id), ExtReal::zero());
        assert_eq!(distortion(&sigma(2, 1.0), &sigma(2, 2.0), &id), ExtReal::Finite(1.0));
        let c = Correspondence { pairs: vec![(0, 0), (1, 1), (2, 1)] };
        assert!(c.is_valid(3, 2));
        assert_eq!(distortion(&sigma(3, 1.0), &sigma(2, 1.0), &c), ExtReal::Finite(1.0));
        assert!(!Correspondence { pairs: vec![(0, 0)] }.is_valid(2, 1));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact(&sigma(2, 1.0), &sigma(2, 2.0)), 0.5);
        assert_eq!(exact(&sigma(2, 1.0), &sigma(3, 1.0)), 0.5);
        let x = FiniteSpace::from_finite(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.5],
            vec![2.0, 1.5, 0.0],
        ])
        .unwrap();
        assert_eq!(exact(&x, &FiniteSpace::single_point()), 1.0);
        let r = gh_exact(&x, &x.permute(&[1, 2, 0]), DEFAULT_LIMIT).unwrap();
        assert_eq!(r.value.hi, 0.0);
        let w = r.witness.unwrap();
        assert!(w.is_valid(3, 3));
    }

    #[test]
    fn rejects_infinite() {
        let inf2 = FiniteSpace::<f64>::from_fn(2, |_, _| ExtReal::INF).unwrap();
        assert!(matches!(gh_exact(&inf2, &sigma(2, 1.0), 10), Err(Error::InfiniteEntry)));
    }

    #[test]
    fn pointed_examples() {
        let a = PointedSpace::new(sigma(2, 1.0), 0).unwrap();
        let b = PointedSpace::new(sigma(2, 2.0), 0).unwrap();
        assert_eq!(gh_pointed(&a, &b, DEFAULT_LIMIT).unwrap().value.lo, 0.5);
        assert_eq!(gh_pointed(&a, &a, DEFAULT_LIMIT).unwrap().value.lo, 0.0);
        // Basepoint forced to an end of a path versus its middle.
        let path = FiniteSpace::from_fn(3, |i, j| ExtReal::Finite((j - i) as f64)).unwrap();
        let end = PointedSpace::new(path.clone(), 0).unwrap();
        let mid = PointedSpace::new(path, 1).unwrap();
        assert!(gh_pointed(&end, &mid, DEFAULT_LIMIT).unwrap().value.lo > 0.0);
    }

    #[test]
    fn bounds_examples() {
        let x = sigma(4, 1.5);
        let r = gh_bounds(&x, &x, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.value, Interval::point(0.0));
        let r = gh_bounds(&sigma(2, 1.0), &sigma(2, 3.0), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.value, Interval::point(1.0));
    }

    #[test]
    fn hausdorff_of_families() {
        let pw = |a: &FiniteSpace<f64>, b: &FiniteSpace<f64>| gh_exact(a, b, DEFAULT_LIMIT).unwrap().value;
        let one = FiniteSpace::single_point();
        let a = vec![sigma(2, 1.0)];
        assert_eq!(hausdorff_between_sets(&a, &a, pw).unwrap(), Interval::point(0.0));
        let h = hausdorff_between_sets(&[one.clone()], &[one, sigma(2, 1.0)], pw).unwrap();
        assert_eq!(h, Interval::point(0.5));
        let h = hausdorff_between_sets(&[sigma(2, 1.0)], &[sigma(2, 1.2)], pw).unwrap();
        assert!((h.lo - 0.1).abs() < 1e-12 && (h.hi - 0.1).abs() < 1e-12);
        let empty: Vec<FiniteSpace<f64>> = Vec::new();
        assert!(matches!(hausdorff_between_sets(&empty, &a, pw), Err(Error::EmptySet)));
    }
}
