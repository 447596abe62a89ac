//! Metrics with entries on an integer grid `{0, δ, 2δ, …}`.
//!
//! Entries are stored as step counts so triangle checks and canonical forms
//! are exact. When `pinned` is set, point 0 is a basepoint: permutations and
//! restrictions keep it in place.

use std::collections::BTreeSet;

use crate::ext::ExtReal;
use crate::metric::FiniteSpace;
use crate::scalar::Scalar;

/// Largest point count for which canonical forms are computed.
pub const CANONICAL_MAX: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridMetric {
    n: usize,
    e: Vec<u32>,
}

impl GridMetric {
    pub fn new(n: usize, e: Vec<u32>) -> Self {
        assert_eq!(e.len(), n * n);
        GridMetric { n, e }
    }

    pub fn single_point() -> Self {
        GridMetric { n: 1, e: vec![0] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.e[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u32) {
        self.e[i * self.n + j] = v;
        self.e[j * self.n + i] = v;
    }

    pub fn diameter(&self) -> u32 {
        self.e.iter().copied().max().unwrap_or(0)
    }

    /// Symmetric, zero diagonal, positive off-diagonal, triangle inequality.
    pub fn is_metric(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != 0 {
                return false;
            }
            for j in 0..n {
                if i != j && (self.get(i, j) == 0 || self.get(i, j) != self.get(j, i)) {
                    return false;
                }
            }
        }
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.get(i, j) <= self.get(i, k) + self.get(k, j))))
    }

    pub fn restrict(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        let mut e = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                e.push(self.get(i, j));
            }
        }
        GridMetric { n: m, e }
    }

    /// Upper triangle read row by row.
    fn upper(&self, perm: &[usize]) -> Vec<u32> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in (a + 1)..n {
                out.push(self.get(perm[a], perm[b]));
            }
        }
        out
    }

    /// Lexicographically least upper triangle over all relabelings (over
    /// those fixing point 0 when `pinned`). One representative per isometry
    /// class. Spaces above [`CANONICAL_MAX`] points are returned unchanged.
    pub fn canonical(&self, pinned: bool) -> Self {
        let n = self.n;
        if n <= 1 || n > CANONICAL_MAX {
            return self.clone();
        }
        let start = usize::from(pinned);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best_perm = perm.clone();
        let mut best = self.upper(&perm);
        while next_permutation(&mut perm[start..]) {
            let cand = self.upper(&perm);
            if cand < best {
                best = cand;
                best_perm = perm.clone();
            }
        }
        self.restrict(&best_perm)
    }

    pub fn to_space<T: Scalar>(&self, delta: T) -> FiniteSpace<T> {
        FiniteSpace::from_raw(self.n, self.e.iter().map(|&k| ExtReal::Finite(delta * T::lit(k as f64))).collect())
    }

    /// Entrywise floor onto the grid followed by shortest-path closure
    /// (the largest grid pseudometric below the input), then capped at
    /// `cap_steps` and with zero-distance points merged. Point 0 survives
    /// the merge, so a basepoint in position 0 stays in position 0.
    /// Distances within `1e-9` below a grid value count as on it.
    pub fn floor_closure<T: Scalar>(x: &FiniteSpace<T>, delta: T, cap_steps: u32) -> Self {
        let n = x.len();
        let fuzz = T::lit(1e-9);
        let mut e = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let steps = match x.d(i, j) {
                        ExtReal::Inf => cap_steps,
                        ExtReal::Finite(v) => {
                            let q = ((v + fuzz) / delta).floor();
                            q.to_u32().unwrap_or(u32::MAX).min(cap_steps)
                        }
                    };
                    e[i * n + j] = steps;
                }
            }
        }
        let mut g = GridMetric { n, e };
        g.close();
        g.merge_zeros()
    }

    /// Entrywise ceiling onto the grid; preserves the triangle inequality.
    pub fn ceil_of<T: Scalar>(x: &FiniteSpace<T>, delta: T, cap_steps: u32) -> Self {
        let n = x.len();
        let fuzz = T::lit(1e-9);
        let mut e = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    e[i * n + j] = match x.d(i, j) {
                        ExtReal::Inf => cap_steps,
                        ExtReal::Finite(v) => ((v - fuzz) / delta).ceil().max(T::one()).to_u32().unwrap_or(u32::MAX).min(cap_steps),
                    };
                }
            }
        }
        GridMetric { n, e }
    }

    fn close(&mut self) {
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = self.get(i, k).saturating_add(self.get(k, j));
                    if via < self.get(i, j) {
                        self.e[i * n + j] = via;
                    }
                }
            }
        }
    }

    fn merge_zeros(&self) -> Self {
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..self.n {
            if keep.iter().all(|&k| self.get(k, i) > 0) {
                keep.push(i);
            }
        }
        self.restrict(&keep)
    }
}

/// Advances to the next lexicographic permutation; `false` after the last.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Every grid metric entrywise below `top` on any nonempty subset of its
/// points (containing point 0 when `pinned`), canonicalized and deduplicated.
pub fn downward_closure(top: &GridMetric, pinned: bool) -> BTreeSet<GridMetric> {
    let n = top.len();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        if pinned && mask & 1 == 0 {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub = top.restrict(&idx);
        let caps = sub.upper(&(0..sub.len()).collect::<Vec<_>>());
        for_each_below(sub.len(), &caps, |g| {
            out.insert(g.canonical(pinned));
        });
    }
    out
}

/// Every grid metric on exactly `n` points with entries in `1..=max_steps`.
pub fn all_metrics(n: usize, max_steps: u32, pinned: bool) -> BTreeSet<GridMetric> {
    let caps = vec![max_steps; n * n.saturating_sub(1) / 2];
    let mut out = BTreeSet::new();
    for_each_below(n, &caps, |g| {
        out.insert(g.canonical(pinned));
    });
    out
}

/// Calls `f` on every metric whose upper-triangle entries lie in
/// `1..=caps[k]`, building entries in row order and rejecting a partial
/// matrix as soon as a completed triangle fails.
fn for_each_below(n: usize, caps: &[u32], mut f: impl FnMut(&GridMetric)) {
    if n == 1 {
        f(&GridMetric::single_point());
        return;
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect();
    let mut g = GridMetric { n, e: vec![0; n * n] };
    fn rec(
        g: &mut GridMetric,
        pairs: &[(usize, usize)],
        caps: &[u32],
        k: usize,
        f: &mut dyn FnMut(&GridMetric),
    ) {
        if k == pairs.len() {
            f(g);
            return;
        }
        let (a, b) = pairs[k];
        for v in 1..=caps[k] {
            g.set(a, b, v);
            // Triangles (a, c, b) whose three edges are now all assigned.
            let ok = (0..g.n).all(|c| {
                if c == a || c == b {
                    return true;
                }
                let (x, y) = (g.get(a, c), g.get(c, b));
                let assigned = |p: usize, q: usize| {
                    let (p, q) = if p < q { (p, q) } else { (q, p) };
                    pairs[..=k].contains(&(p, q))
                };
                if !(assigned(a, c) && assigned(c, b)) {
                    return true;
                }
                v <= x + y && x <= v + y && y <= v + x
            });
            if ok {
                rec(g, pairs, caps, k + 1, f);
            }
        }
        g.set(a, b, 0);
    }
    rec(&mut g, &pairs, caps, 0, &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_identifies_relabelings() {
        let a = GridMetric::new(3, vec![0, 1, 2, 1, 0, 3, 2, 3, 0]);
        let b = a.restrict(&[2, 0, 1]);
        assert_eq!(a.canonical(false), b.canonical(false));
        assert_eq!(a.canonical(false).upper(&[0, 1, 2]), vec![1, 2, 3]);
        // Pinning point 0 separates the two choices of basepoint.
        assert_ne!(a.canonical(true), b.canonical(true));
    }

    #[test]
    fn metric_counts() {
        // Two points: one class per positive step.
        assert_eq!(all_metrics(2, 4, false).len(), 4);
        // Three points with steps in {1,2}: multisets {a,b,c} obeying the
        // triangle inequality: 111, 112, 122, 222 (113 is out of range).
        assert_eq!(all_metrics(3, 2, false).len(), 4);
        assert!(all_metrics(3, 3, false).iter().all(GridMetric::is_metric));
    }

    #[test]
    fn floor_closure_stays_below() {
        let x = FiniteSpace::from_finite(&[vec![0.0, 0.6, 1.2], vec![0.6, 0.0, 0.6], vec![1.2, 0.6, 0.0]]).unwrap();
        let g = GridMetric::floor_closure(&x, 0.5, 100);
        assert!(g.is_metric());
        assert_eq!(g.upper(&[0, 1, 2]), vec![1, 2, 1]);
        let tight = GridMetric::floor_closure(&x, 1.0, 100);
        // Floors 0, 1, 0 collapse everything onto a point.
        assert_eq!(tight.len(), 1);
    }

    #[test]
    fn downward_of_two_point() {
        let top = GridMetric::new(2, vec![0, 2, 2, 0]);
        let all = downward_closure(&top, false);
        assert_eq!(all.len(), 3);
    }
}
