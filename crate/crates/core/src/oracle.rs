//! Brute-force reference implementations for tiny instances.
//!
//! Nothing here shares search code with the engines: correspondences and
//! maps are enumerated in full, grid universes by plain nested loops, and
//! isometry classes by trying every permutation.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::metric::FiniteSpace;
use crate::pyramid::PyramidHandle;

/// Largest side accepted by [`oracle_gh`].
pub const ORACLE_GH_MAX: usize = 5;
/// Largest slice level accepted by the grid oracles.
pub const ORACLE_SLICE_MAX: usize = 3;

fn finite_rows(x: &FiniteSpace<f64>) -> Result<Vec<Vec<f64>>> {
    x.require_finite()?;
    Ok((0..x.len()).map(|i| (0..x.len()).map(|j| x.df(i, j)).collect()).collect())
}

/// Visits every subset of the `nx × ny` cells, tracking the distortion of
/// the relation built so far and which rows and columns it covers.
fn all_relations(
    dx: &[Vec<f64>],
    dy: &[Vec<f64>],
    required: Option<(usize, usize)>,
) -> f64 {
    let (nx, ny) = (dx.len(), dy.len());
    let cells: Vec<(usize, usize)> = (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut best = f64::INFINITY;
    #[allow(clippy::too_many_arguments)]
    fn walk(
        k: usize,
        cells: &[(usize, usize)],
        chosen: &mut Vec<(usize, usize)>,
        dis: f64,
        rows: u32,
        cols: u32,
        dx: &[Vec<f64>],
        dy: &[Vec<f64>],
        required: Option<(usize, usize)>,
        best: &mut f64,
    ) {
        if k == cells.len() {
            let full = rows.count_ones() as usize == dx.len() && cols.count_ones() as usize == dy.len();
            let has_base = required.is_none_or(|b| chosen.contains(&b));
            if full && has_base && dis < *best {
                *best = dis;
            }
            return;
        }
        walk(k + 1, cells, chosen, dis, rows, cols, dx, dy, required, best);
        let (i, j) = cells[k];
        let mut d = dis;
        for &(a, b) in chosen.iter() {
            d = d.max((dx[i][a] - dy[j][b]).abs());
        }
        chosen.push((i, j));
        walk(k + 1, cells, chosen, d, rows | 1 << i, cols | 1 << j, dx, dy, required, best);
        chosen.pop();
    }
    walk(0, &cells, &mut chosen, 0.0, 0, 0, dx, dy, required, &mut best);
    best
}

/// `d_GH` by enumerating every relation between the two point sets.
pub fn oracle_gh(x: &FiniteSpace<f64>, y: &FiniteSpace<f64>) -> Result<f64> {
    if x.len() > ORACLE_GH_MAX || y.len() > ORACLE_GH_MAX {
        return Err(Error::SizeLimitExceeded { limit: ORACLE_GH_MAX as u64 });
    }
    Ok(all_relations(&finite_rows(x)?, &finite_rows(y)?, None) / 2.0)
}

/// Pointed surrogate: relations must contain the base pair.
pub fn oracle_gh_pointed(x: &FiniteSpace<f64>, bx: usize, y: &FiniteSpace<f64>, by: usize) -> Result<f64> {
    if x.len() > ORACLE_GH_MAX || y.len() > ORACLE_GH_MAX {
        return Err(Error::SizeLimitExceeded { limit: ORACLE_GH_MAX as u64 });
    }
    Ok(all_relations(&finite_rows(x)?, &finite_rows(y)?, Some((bx, by))) / 2.0)
}

/// Least widening defect over all `|Y|^|X|` maps.
pub fn oracle_defect(x: &FiniteSpace<f64>, y: &FiniteSpace<f64>) -> ExtReal<f64> {
    let (n, m) = (x.len(), y.len());
    let mut f = vec![0usize; n];
    let mut best = ExtReal::INF;
    loop {
        let mut worst = ExtReal::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max(x.d(i, j).excess_over(y.d(f[i], f[j])));
            }
        }
        best = best.min(worst);
        let mut v = 0;
        loop {
            if v == n {
                return best;
            }
            f[v] += 1;
            if f[v] < m {
                break;
            }
            f[v] = 0;
            v += 1;
        }
    }
}

/// Integer matrix of grid steps.
type Steps = Vec<Vec<u32>>;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn class_key(m: &Steps) -> Vec<u32> {
    let n = m.len();
    permutations(n)
        .iter()
        .map(|p| (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).map(|(a, b)| m[p[a]][p[b]]).collect::<Vec<u32>>())
        .min()
        .unwrap_or_default()
}

/// Every metric with at most `N` points and entries in `{δ, 2δ, …, D}`,
/// one per isometry class.
#[derive(Clone, Debug)]
pub struct GridUniverse {
    pub n: usize,
    pub steps: u32,
    pub delta: f64,
    pub elements: Vec<FiniteSpace<f64>>,
}

impl GridUniverse {
    pub fn new(n: usize, cap: f64, delta: f64) -> Result<Self> {
        if n == 0 || n > ORACLE_SLICE_MAX || !(delta > 0.0) || !(cap >= delta) {
            return Err(Error::InvalidParameter("grid universe needs 1 <= N <= 3 and 0 < delta <= D".into()));
        }
        let steps = (cap / delta + 1e-9).floor() as u32;
        let mut keys: BTreeSet<(usize, Vec<u32>)> = BTreeSet::new();
        for k in 1..=n {
            let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| ((a + 1)..k).map(move |b| (a, b))).collect();
            let total = (steps as u64).pow(pairs.len() as u32);
            for code in 0..total {
                let mut m = vec![vec![0u32; k]; k];
                let mut c = code;
                for &(a, b) in &pairs {
                    let v = (c % steps as u64) as u32 + 1;
                    c /= steps as u64;
                    m[a][b] = v;
                    m[b][a] = v;
                }
                let metric = (0..k).all(|i| (0..k).all(|j| (0..k).all(|l| m[i][j] <= m[i][l] + m[l][j])));
                if metric {
                    keys.insert((k, class_key(&m)));
                }
            }
        }
        let elements = keys
            .iter()
            .map(|(k, upper)| {
                let mut it = upper.iter();
                let mut rows = vec![vec![0.0; *k]; *k];
                for a in 0..*k {
                    for b in (a + 1)..*k {
                        let v = *it.next().unwrap() as f64 * delta;
                        rows[a][b] = v;
                        rows[b][a] = v;
                    }
                }
                FiniteSpace::from_finite(&rows).expect("grid metric")
            })
            .collect();
        Ok(GridUniverse { n, steps, delta, elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The grid slice `P ∩ H(N,D)`: universe elements dominated by the handle,
/// as indices into `universe.elements`.
pub fn oracle_slice(p: &PyramidHandle<f64>, universe: &GridUniverse) -> Vec<usize> {
    (0..universe.len())
        .filter(|&i| match p {
            PyramidHandle::MaxSentinel => true,
            PyramidHandle::Finite(x) => oracle_defect(&universe.elements[i], x) <= ExtReal::Finite(1e-9),
        })
        .collect()
}

struct Cached {
    universe: GridUniverse,
    /// Row-major `d_GH` between universe elements.
    gh: Vec<f64>,
}

fn cached(n: usize, delta: f64) -> Result<Arc<Cached>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<Cached>>>> = OnceLock::new();
    let key = (n, delta.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&key) {
        return Ok(c.clone());
    }
    let universe = GridUniverse::new(n, n as f64, delta)?;
    let u = universe.len();
    let mut gh = vec![0.0; u * u];
    for i in 0..u {
        for j in (i + 1)..u {
            let v = oracle_gh(&universe.elements[i], &universe.elements[j])?;
            gh[i * u + j] = v;
            gh[j * u + i] = v;
        }
    }
    let c = Arc::new(Cached { universe, gh });
    cache.lock().unwrap().insert(key, c.clone());
    Ok(c)
}

/// Indices of the grid `(N, N)`-slice of `p` in the cached universe for
/// `(N, δ)`; pass them to [`oracle_hausdorff`].
pub fn oracle_slice_at(p: &PyramidHandle<f64>, n: usize, delta: f64) -> Result<Vec<usize>> {
    Ok(oracle_slice(p, &cached(n, delta)?.universe))
}

/// Hausdorff distance under [`oracle_gh`] between two slices given as
/// indices into the cached `(N, δ)` universe.
pub fn oracle_hausdorff(sa: &[usize], sb: &[usize], n: usize, delta: f64) -> Result<f64> {
    let c = cached(n, delta)?;
    let u = c.universe.len();
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&i| to.iter().map(|&j| c.gh[i * u + j]).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(sa, sb).max(directed(sb, sa)))
}

/// Exact Hausdorff distance between the grid `(N, N)`-slices under
/// [`oracle_gh`]. Differs from `ρ_N` by at most the grid slack `δ`.
pub fn oracle_rho_n(a: &PyramidHandle<f64>, b: &PyramidHandle<f64>, n: usize, delta: f64) -> Result<f64> {
    oracle_hausdorff(&oracle_slice_at(a, n, delta)?, &oracle_slice_at(b, n, delta)?, n, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(n: usize, d: f64) -> FiniteSpace<f64> {
        FiniteSpace::from_fn(n, |_, _| ExtReal::Finite(d)).unwrap()
    }

    #[test]
    fn gh_examples() {
        assert_eq!(oracle_gh(&sigma(2, 1.0), &sigma(3, 1.0)).unwrap(), 0.5);
        let x = FiniteSpace::from_finite(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]]).unwrap();
        assert_eq!(oracle_gh(&x, &x).unwrap(), 0.0);
        assert_eq!(oracle_gh(&sigma(1, 0.0), &x).unwrap(), 1.0);
        assert_eq!(oracle_gh_pointed(&sigma(2, 1.0), 0, &sigma(2, 1.0), 1).unwrap(), 0.0);
    }

    #[test]
    fn universe_and_slices() {
        let u = GridUniverse::new(2, 2.0, 0.5).unwrap();
        assert_eq!(u.len(), 5);
        let s = oracle_slice(&PyramidHandle::Finite(sigma(2, 1.0)), &u);
        assert_eq!(s.len(), 3);
        assert_eq!(oracle_slice(&PyramidHandle::MaxSentinel, &u).len(), u.len());
        assert_eq!(oracle_slice(&PyramidHandle::Finite(sigma(1, 0.0)), &u).len(), 1);
    }

    #[test]
    fn rho_n_examples() {
        let one = PyramidHandle::Finite(sigma(1, 0.0));
        let two = PyramidHandle::Finite(sigma(2, 1.0));
        assert_eq!(oracle_rho_n(&one, &two, 2, 0.25).unwrap(), 0.5);
        assert_eq!(oracle_rho_n(&two, &two, 3, 0.25).unwrap(), 0.0);
    }
}
