//! Pyramids `P_X = {Y | Y ≾ X}`, their slices, and the distances `ρ_N`, `ρ`.
//!
//! For a finite `A`, every member of the slice `P_A ∩ H(N,D)` is dominated
//! by `S ∧ D` for some `S ⊆ A` with `min(N,|A|)` points. Two facts make the
//! slice Hausdorff distance computable from such maximal configurations:
//!
//! * if `d_GH(a,b) < ε` and `b ≾ B` then `a` has widening defect `≤ 2ε`
//!   into `B`;
//! * conversely, pulling `a` into `B ∧ D` along a map of defect `η` and
//!   repairing its Kuratowski coordinates with the averaged McShane
//!   envelope gives a member of `P_B ∩ H(N,D)` within `η/2` of `a`.
//!
//! Hence the directed distance is `½ max_S defect(S ∧ D, B ∧ D)`, the
//! maximum taken over maximal configurations, and defect is monotone under
//! domination, so only maximal `S` are visited.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::gh::{gh_exact, gh_pointed, hausdorff_between_sets};
use crate::grid::{all_metrics, downward_closure, GridMetric};
use crate::interval::Interval;
use crate::metric::{FiniteSpace, PointedSpace};
use crate::order::{
    pointed_defect_bounded, precsim, precsim_pointed, widening_defect_bounded, DefectBounds, DEFAULT_LIMIT,
};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub enum PyramidHandle<T: Scalar> {
    Finite(FiniteSpace<T>),
    /// The pyramid of `Σ_∞(∞)`: every slice is all of `H(N,D)`.
    MaxSentinel,
}

/// Pointed counterpart of [`PyramidHandle`].
#[derive(Clone, Debug)]
pub enum PointedHandle<T: Scalar> {
    Finite(PointedSpace<T>),
    MaxSentinel,
}

impl<T: Scalar> From<FiniteSpace<T>> for PyramidHandle<T> {
    fn from(x: FiniteSpace<T>) -> Self {
        PyramidHandle::Finite(x)
    }
}

impl<T: Scalar> From<PointedSpace<T>> for PointedHandle<T> {
    fn from(x: PointedSpace<T>) -> Self {
        PointedHandle::Finite(x)
    }
}

/// Tuning for slice computations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoParams {
    pub n_max: usize,
    /// Grid step for slice nets.
    pub delta: f64,
    pub tol: f64,
    /// Largest number of maximal configurations enumerated exhaustively;
    /// above it configurations are sampled.
    pub budget: u64,
    /// Configurations drawn when sampling.
    pub samples: usize,
    /// Node budget of each defect search.
    pub defect_budget: u64,
    pub seed: u64,
}

impl Default for RhoParams {
    fn default() -> Self {
        RhoParams {
            n_max: 8,
            delta: 0.25,
            tol: 1e-9,
            budget: 20_000,
            samples: 256,
            defect_budget: 400_000,
            seed: 0,
        }
    }
}

impl RhoParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 || !(self.delta > 0.0) || !(self.tol >= 0.0) || self.samples == 0 {
            return Err(Error::InvalidParameter("need n_max >= 1, delta > 0, tol >= 0, samples >= 1".into()));
        }
        Ok(())
    }
}

/// One directed slice distance `sup_{a ∈ S_A} d_GH(a, S_B)` (or a slice
/// Hausdorff distance after symmetrizing).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceBound<T> {
    /// Reported enclosure. When `certified` is false its upper end comes
    /// from sampled configurations only.
    pub value: Interval<T>,
    /// Upper bound that holds regardless of sampling.
    pub hi_certified: T,
    pub certified: bool,
}

impl<T: Scalar> SliceBound<T> {
    fn zero() -> Self {
        SliceBound { value: Interval::point(T::zero()), hi_certified: T::zero(), certified: true }
    }

    fn join(self, other: Self) -> Self {
        SliceBound {
            value: self.value.max(&other.value),
            hi_certified: self.hi_certified.max(other.hi_certified),
            certified: self.certified && other.certified,
        }
    }

    fn halved(self) -> Self {
        let h = T::lit(0.5);
        SliceBound { value: self.value.scale(h), hi_certified: self.hi_certified * h, certified: self.certified }
    }
}

/// One side of a slice comparison.
#[derive(Clone, Copy)]
pub(crate) enum Side<'a, T> {
    Space { s: &'a FiniteSpace<T>, base: Option<usize> },
    Max { pinned: bool },
}

impl<'a, T: Scalar> Side<'a, T> {
    pub(crate) fn plain(h: &'a PyramidHandle<T>) -> Self {
        match h {
            PyramidHandle::Finite(s) => Side::Space { s, base: None },
            PyramidHandle::MaxSentinel => Side::Max { pinned: false },
        }
    }

    pub(crate) fn pointed(h: &'a PointedHandle<T>) -> Self {
        match h {
            PointedHandle::Finite(p) => Side::Space { s: &p.space, base: Some(p.base()) },
            PointedHandle::MaxSentinel => Side::Max { pinned: true },
        }
    }
}

fn defect_bounds<T: Scalar>(
    x: &FiniteSpace<T>,
    y: &FiniteSpace<T>,
    pinned: Option<usize>,
    budget: u64,
) -> DefectBounds<T> {
    match pinned {
        // `x` carries its base in position 0.
        Some(yb) => {
            let px = PointedSpace::new(x.clone(), 0).expect("nonempty");
            let py = PointedSpace::new(y.clone(), yb).expect("base in range");
            pointed_defect_bounded(&px, &py, budget)
        }
        None => widening_defect_bounded(x, y, budget),
    }
}

fn choose(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All `k`-subsets of `pool`, lexicographic in positions.
fn combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = pool.len();
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| pool[i]).collect());
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Greedy farthest-point configuration of size `m` grown from `start`.
fn farthest_from<T: Scalar>(s: &FiniteSpace<T>, start: usize, m: usize) -> Vec<usize> {
    let n = s.len();
    let mut chosen = vec![start];
    let mut gap: Vec<ExtReal<T>> = (0..n).map(|j| s.d(start, j)).collect();
    while chosen.len() < m.min(n) {
        let mut next = usize::MAX;
        for j in 0..n {
            if !chosen.contains(&j) && (next == usize::MAX || gap[j] > gap[next]) {
                next = j;
            }
        }
        chosen.push(next);
        for j in 0..n {
            gap[j] = gap[j].min(s.d(next, j));
        }
    }
    chosen
}

/// Maximal configurations of `s` of size `m` (containing `base` first when
/// pointed): every one when there are at most `budget`, otherwise a seeded
/// sample seeded by farthest-point configurations. The flag tells whether
/// the list is complete.
pub(crate) fn configurations<T: Scalar>(
    s: &FiniteSpace<T>,
    base: Option<usize>,
    m: usize,
    budget: u64,
    samples: usize,
    seed: u64,
) -> (Vec<Vec<usize>>, bool) {
    let n = s.len();
    let m = m.min(n);
    let pool: Vec<usize> = (0..n).filter(|&i| Some(i) != base).collect();
    let free = m - usize::from(base.is_some());
    let with_base = |mut c: Vec<usize>| {
        if let Some(b) = base {
            c.insert(0, b);
        }
        c
    };
    if choose(pool.len(), free) <= budget as u128 {
        return (combinations(&pool, free).into_iter().map(with_base).collect(), true);
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |c: Vec<usize>, out: &mut Vec<Vec<usize>>| {
        let mut key = c.clone();
        key.sort_unstable();
        if seen.insert(key) {
            out.push(c);
        }
    };
    let starts: Vec<usize> = match base {
        Some(b) => vec![b],
        None => (0..n).collect(),
    };
    for &st in starts.iter().take(samples / 2 + 1) {
        let mut c = farthest_from(s, st, m);
        if let Some(b) = base {
            c.retain(|&i| i != b);
            c.truncate(free);
            c.insert(0, b);
        }
        push(c, &mut out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while out.len() < samples && attempts < samples * 4 {
        attempts += 1;
        let picked: Vec<usize> = sample(&mut rng, pool.len(), free).into_iter().map(|i| pool[i]).collect();
        push(with_base(picked), &mut out);
    }
    (out, false)
}

/// `sup` over members `a` of the `(N, cap)`-slice of `a_side` of the least
/// defect of `a` into `b_side ∧ cap`, as an enclosure.
pub(crate) fn directed_defect<T: Scalar>(
    a_side: Side<'_, T>,
    b_side: Side<'_, T>,
    n: usize,
    cap: T,
    p: &RhoParams,
) -> SliceBound<T> {
    let (b, b_base) = match b_side {
        Side::Max { .. } => return SliceBound::zero(),
        Side::Space { s, base } => (s.truncate(cap), base),
    };
    let from_bounds = |d: &DefectBounds<T>| Interval::new(d.lower.to_float(), d.upper.to_float());
    let (a, a_base) = match a_side {
        Side::Max { .. } => {
            // Σ_N(cap) dominates the whole slice.
            let top = FiniteSpace::from_fn(n, |_, _| ExtReal::Finite(cap)).expect("valid");
            let d = defect_bounds(&top, &b, b_base, p.defect_budget);
            let v = from_bounds(&d);
            return SliceBound { value: v, hi_certified: v.hi, certified: true };
        }
        Side::Space { s, base } => (s.truncate(cap), base),
    };
    let whole_a = match a_base {
        Some(ab) => a.restrict(&std::iter::once(ab).chain((0..a.len()).filter(|&i| i != ab)).collect::<Vec<_>>()),
        None => a.clone(),
    };
    // Beyond `n` points the whole space only supplies a quick zero test and
    // a certified upper bound, so it gets a smaller search.
    let whole_budget = if a.len() <= n { p.defect_budget } else { p.defect_budget / 100 + 1 };
    let whole = from_bounds(&defect_bounds(&whole_a, &b, b_base, whole_budget));
    if a.len() <= n {
        return SliceBound { value: whole, hi_certified: whole.hi, certified: true };
    }
    if whole.hi <= T::lit(p.tol) {
        let v = Interval::new(T::zero(), whole.hi);
        return SliceBound { value: v, hi_certified: whole.hi, certified: true };
    }
    let seed = p.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let (configs, complete) = configurations(&a, a_base, n, p.budget, p.samples, seed);
    let per: Vec<Interval<T>> = configs
        .par_iter()
        .map(|c| from_bounds(&defect_bounds(&a.restrict(c), &b, b_base, p.defect_budget)))
        .collect();
    let best = per.iter().fold(Interval::point(T::zero()), |m, v| m.max(v));
    if complete {
        let hi = best.hi.min(whole.hi);
        SliceBound { value: Interval::new(best.lo.min(hi), hi), hi_certified: hi, certified: true }
    } else {
        SliceBound { value: best, hi_certified: whole.hi.max(best.hi), certified: false }
    }
}

/// Hausdorff distance between the `(N, cap)`-slices of two sides.
pub(crate) fn slice_hausdorff<T: Scalar>(
    a: Side<'_, T>,
    b: Side<'_, T>,
    n: usize,
    cap: T,
    p: &RhoParams,
) -> SliceBound<T> {
    let ab = directed_defect(a, b, n, cap, p);
    let ba = directed_defect(b, a, n, cap, p);
    let out = ab.join(ba).halved();
    let top = T::lit(n as f64);
    // A zero defect comes from an exact map and needs no rounding pad.
    let pad = if out.value.hi > T::zero() { T::lit(1e-12) * T::one().max(out.value.hi) } else { T::zero() };
    SliceBound {
        value: out.value.widen(pad).clamp(T::zero(), top),
        hi_certified: (out.hi_certified + pad).min(top),
        certified: out.certified,
    }
}

/// `Y ∈ P`: `Y ≾ X` up to `tol`.
pub fn member<T: Scalar>(y: &FiniteSpace<T>, p: &PyramidHandle<T>, tol: T) -> Result<bool> {
    y.require_finite()?;
    match p {
        PyramidHandle::MaxSentinel => Ok(true),
        PyramidHandle::Finite(x) => precsim(y, x, tol),
    }
}

pub fn member_pointed<T: Scalar>(y: &PointedSpace<T>, p: &PointedHandle<T>, tol: T) -> Result<bool> {
    y.space.require_finite()?;
    match p {
        PointedHandle::MaxSentinel => Ok(true),
        PointedHandle::Finite(x) => precsim_pointed(y, x, tol),
    }
}

/// A finite net of a slice `P ∩ H(N,D)` with grid entries.
#[derive(Clone, Debug)]
pub struct SliceNet<T: Scalar> {
    pub n: usize,
    pub cap: T,
    pub delta: T,
    pub elements: Vec<FiniteSpace<T>>,
    /// Base index of each element (0) when the net is pointed.
    pub pointed: bool,
    pub net_radius: T,
    /// Whether `net_radius` is proven: exhaustive downward closure over
    /// every maximal configuration.
    pub certified: bool,
}

impl<T: Scalar> SliceNet<T> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn pointed_elements(&self) -> Vec<PointedSpace<T>> {
        self.elements.iter().map(|e| PointedSpace::new(e.clone(), 0).expect("nonempty")).collect()
    }
}

/// Largest `N` for which downward closures are enumerated.
pub const EXHAUSTIVE_MAX_N: usize = 3;

fn check_slice_args<T: Scalar>(n: usize, cap: T, delta: T) -> Result<u32> {
    if n == 0 || !(cap > T::zero()) || !(delta > T::zero()) {
        return Err(Error::InvalidParameter("slice needs N >= 1, D > 0, delta > 0".into()));
    }
    let steps = (cap / delta + T::lit(1e-9)).floor();
    steps.to_u32().filter(|&s| s >= 1).ok_or_else(|| Error::InvalidParameter("delta exceeds D".into()))
}

fn build_net<T: Scalar>(
    side: Side<'_, T>,
    n: usize,
    cap: T,
    delta: T,
    budget: u64,
) -> Result<SliceNet<T>> {
    let steps = check_slice_args(n, cap, delta)?;
    let pinned = matches!(side, Side::Max { pinned: true } | Side::Space { base: Some(_), .. });
    let mut set: BTreeSet<GridMetric> = BTreeSet::new();
    let (radius, certified) = match side {
        Side::Max { .. } => {
            let mut estimate: u128 = 0;
            for k in 1..=n {
                estimate = estimate.saturating_add((steps as u128).saturating_pow((k * (k - 1) / 2) as u32));
            }
            if estimate > budget as u128 {
                return Err(Error::BudgetExceeded { budget: budget as usize });
            }
            for k in 1..=n {
                set.extend(all_metrics(k, steps, pinned));
            }
            // Ceiling rounding moves any metric onto the grid by < δ; the
            // gap between D and the top grid value adds its share.
            let slack = cap - delta * T::lit(steps as f64);
            (delta / T::lit(2.0) + slack, true)
        }
        Side::Space { s, base } => {
            let (configs, complete) = configurations(s, base, n, budget, 256, 0x5EED);
            for c in &configs {
                if n <= EXHAUSTIVE_MAX_N {
                    // The closure of a floor depends on the surrounding
                    // points, so every sub-configuration gets its own.
                    let need = usize::from(pinned);
                    for mask in 1..(1usize << c.len()) {
                        if mask & need != need {
                            continue;
                        }
                        let sub: Vec<usize> = (0..c.len()).filter(|&i| mask >> i & 1 == 1).map(|i| c[i]).collect();
                        let top = GridMetric::floor_closure(&s.restrict(&sub), delta, steps);
                        set.extend(downward_closure(&top, pinned));
                    }
                } else {
                    set.insert(GridMetric::floor_closure(&s.restrict(c), delta, steps).canonical(pinned));
                }
            }
            // Floor plus closure loses < (N-1)δ on every distance.
            let r = delta * T::lit((n.max(1) - 1) as f64) / T::lit(2.0);
            (r, complete && n <= EXHAUSTIVE_MAX_N)
        }
    };
    Ok(SliceNet {
        n,
        cap,
        delta,
        elements: set.iter().map(|g| g.to_space(delta)).collect(),
        pointed: pinned,
        net_radius: radius,
        certified,
    })
}

/// A grid net of `P ∩ H(N,D)`. Elements are genuine members. For finite
/// handles they are floor-side grid metrics of maximal configurations and,
/// when `N <= 3`, of all their subsets, closed downward; the sentinel net is the
/// whole grid `H(N,D)`. `budget` caps both configuration enumeration and the
/// sentinel grid size.
pub fn slice_net<T: Scalar>(p: &PyramidHandle<T>, n: usize, cap: T, delta: T, budget: u64) -> Result<SliceNet<T>> {
    build_net(Side::plain(p), n, cap, delta, budget)
}

/// Pointed version of [`slice_net`]; each element has its base at index 0.
pub fn pointed_slice_net<T: Scalar>(
    p: &PointedHandle<T>,
    n: usize,
    cap: T,
    delta: T,
    budget: u64,
) -> Result<SliceNet<T>> {
    build_net(Side::pointed(p), n, cap, delta, budget)
}

/// `ρ_N(A,B)`: Hausdorff distance between the `(N, N)`-slices.
pub fn rho_n<T: Scalar>(a: &PyramidHandle<T>, b: &PyramidHandle<T>, n: usize, p: &RhoParams) -> Result<SliceBound<T>> {
    p.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("N must be >= 1".into()));
    }
    Ok(slice_hausdorff(Side::plain(a), Side::plain(b), n, T::lit(n as f64), p))
}

/// `ρ_N` recomputed from grid nets and exact pairwise GH distances:
/// `[H - r_A - r_B, H + r_A + r_B]` with `H` the net Hausdorff distance.
/// Meaningful as an enclosure only when both nets are certified.
pub fn rho_n_net<T: Scalar>(
    a: &PyramidHandle<T>,
    b: &PyramidHandle<T>,
    n: usize,
    delta: T,
    budget: u64,
) -> Result<(Interval<T>, bool)> {
    let cap = T::lit(n as f64);
    let na = slice_net(a, n, cap, delta, budget)?;
    let nb = slice_net(b, n, cap, delta, budget)?;
    let h = hausdorff_between_sets(&na.elements, &nb.elements, |x, y| {
        gh_exact(x, y, DEFAULT_LIMIT).map(|r| r.value).unwrap_or(Interval::new(T::zero(), cap))
    })?;
    Ok((net_enclosure(h, na.net_radius + nb.net_radius, cap), na.certified && nb.certified))
}

/// Pointed version of [`rho_n_net`].
pub fn rho_n_net_pointed<T: Scalar>(
    a: &PointedHandle<T>,
    b: &PointedHandle<T>,
    n: usize,
    delta: T,
    budget: u64,
) -> Result<(Interval<T>, bool)> {
    let cap = T::lit(n as f64);
    let na = pointed_slice_net(a, n, cap, delta, budget)?;
    let nb = pointed_slice_net(b, n, cap, delta, budget)?;
    let h = hausdorff_between_sets(&na.pointed_elements(), &nb.pointed_elements(), |x, y| {
        gh_pointed(x, y, DEFAULT_LIMIT).map(|r| r.value).unwrap_or(Interval::new(T::zero(), cap))
    })?;
    Ok((net_enclosure(h, na.net_radius + nb.net_radius, cap), na.certified && nb.certified))
}

fn net_enclosure<T: Scalar>(h: Interval<T>, r: T, top: T) -> Interval<T> {
    Interval::new((h.lo - r).max(T::zero()), h.hi + r).clamp(T::zero(), top)
}

/// `ρ = Σ 2^{-N} ρ_N` truncated at `N_max` with the tail accounted for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate<T> {
    pub per_n: BTreeMap<usize, Interval<T>>,
    /// Upper ends of `per_n` that hold without sampling assumptions.
    pub per_n_hi_certified: BTreeMap<usize, T>,
    pub tail_bound: T,
    pub total: Interval<T>,
    pub total_hi_certified: T,
    /// False when some level sampled its configurations: `total.hi` is then
    /// an estimate and `total_hi_certified` is the proven upper bound.
    pub certified: bool,
}

impl<T: Scalar> RhoEstimate<T> {
    pub(crate) fn assemble(per: Vec<(usize, SliceBound<T>)>) -> Self {
        let n_max = per.iter().map(|(n, _)| *n).max().unwrap_or(0);
        let two = T::lit(2.0);
        let tail = T::lit((n_max + 2) as f64) * two.powi(-(n_max as i32));
        let mut lo = T::zero();
        let mut hi = tail;
        let mut hi_cert = tail;
        let mut per_n = BTreeMap::new();
        let mut per_cert = BTreeMap::new();
        let mut certified = true;
        for (n, b) in per {
            let w = two.powi(-(n as i32));
            lo = lo + w * b.value.lo;
            hi = hi + w * b.value.hi;
            hi_cert = hi_cert + w * b.hi_certified;
            certified &= b.certified;
            per_n.insert(n, b.value);
            per_cert.insert(n, b.hi_certified);
        }
        RhoEstimate {
            per_n,
            per_n_hi_certified: per_cert,
            tail_bound: tail,
            total: Interval::new(lo, hi.max(lo)),
            total_hi_certified: hi_cert.max(hi),
            certified,
        }
    }

    /// `{per_N, tail, lo, hi}` plus the certification fields.
    pub fn to_json(&self) -> serde_json::Value {
        let per: Vec<_> = self
            .per_n
            .iter()
            .map(|(n, v)| {
                json!({"N": n, "lo": v.lo.to_f64_lossy(), "hi": v.hi.to_f64_lossy(),
                       "hi_certified": self.per_n_hi_certified[n].to_f64_lossy()})
            })
            .collect();
        json!({
            "per_N": per,
            "tail": self.tail_bound.to_f64_lossy(),
            "lo": self.total.lo.to_f64_lossy(),
            "hi": self.total.hi.to_f64_lossy(),
            "hi_certified": self.total_hi_certified.to_f64_lossy(),
            "certified": self.certified,
        })
    }
}

pub fn rho<T: Scalar>(a: &PyramidHandle<T>, b: &PyramidHandle<T>, p: &RhoParams) -> Result<RhoEstimate<T>> {
    p.validate()?;
    let per = (1..=p.n_max)
        .map(|n| (n, slice_hausdorff(Side::plain(a), Side::plain(b), n, T::lit(n as f64), p)))
        .collect();
    Ok(RhoEstimate::assemble(per))
}

/// Slice Hausdorff distance to `target` at `(N, D)` for each term.
pub fn slice_converge_report<T: Scalar>(
    sequence: &[PyramidHandle<T>],
    target: &PyramidHandle<T>,
    n: usize,
    cap: T,
    p: &RhoParams,
) -> Result<Vec<SliceBound<T>>> {
    p.validate()?;
    if n == 0 || !(cap > T::zero()) {
        return Err(Error::InvalidParameter("slice needs N >= 1 and D > 0".into()));
    }
    Ok(sequence
        .iter()
        .map(|x| slice_hausdorff(Side::plain(x), Side::plain(target), n, cap, p))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(n: usize, d: f64) -> FiniteSpace<f64> {
        FiniteSpace::from_fn(n, |_, _| ExtReal::Finite(d)).unwrap()
    }

    fn fin(x: FiniteSpace<f64>) -> PyramidHandle<f64> {
        PyramidHandle::Finite(x)
    }

    #[test]
    fn membership() {
        let spider = FiniteSpace::from_fn(4, |i, _| ExtReal::Finite(if i == 0 { 1.0 } else { 2.0 })).unwrap();
        assert!(member(&sigma(2, 1.0), &fin(spider), 1e-9).unwrap());
        assert!(!member(&sigma(3, 1.0), &fin(sigma(2, 1.0)), 1e-9).unwrap());
        assert!(member(&sigma(5, 7.0), &PyramidHandle::MaxSentinel, 1e-9).unwrap());
    }

    #[test]
    fn slice_net_examples() {
        let net = slice_net(&fin(sigma(2, 1.0)), 2, 2.0, 0.5, 1000).unwrap();
        let diams: Vec<f64> = net.elements.iter().map(|e| e.diameter().to_float()).collect();
        assert_eq!(diams, vec![0.0, 0.5, 1.0]);
        let max = slice_net::<f64>(&PyramidHandle::MaxSentinel, 2, 2.0, 1.0, 1000).unwrap();
        assert_eq!(max.len(), 3);
        for x in [sigma(3, 1.0), sigma(1, 0.0)] {
            assert_eq!(slice_net(&fin(x), 1, 1.0, 0.25, 1000).unwrap().len(), 1);
        }
    }

    #[test]
    fn rho_n_examples() {
        let p = RhoParams::default();
        let a = fin(sigma(3, 1.5));
        let b = fin(sigma(2, 0.4));
        assert_eq!(rho_n(&a, &b, 1, &p).unwrap().value.hi, 0.0);
        let r2 = rho_n(&a, &b, 2, &p).unwrap().value;
        assert!(r2.contains(0.5 * (1.5 - 0.4)), "{r2:?}");
        let same = rho_n(&a, &a, 3, &p).unwrap().value;
        assert_eq!(same.lo, 0.0);
        assert!(same.hi <= 1e-9);
    }

    #[test]
    fn rho_closed_forms() {
        let p = RhoParams::default();
        let r = rho(&fin(sigma(1, 0.0)), &fin(sigma(2, 1.0)), &p).unwrap();
        assert!(r.total.contains(0.25), "{:?}", r.total);
        let r = rho(&fin(sigma(2, 1.0)), &fin(sigma(4, 1.0)), &p).unwrap();
        assert!(r.total.contains(0.125), "{:?}", r.total);
        assert!(r.certified);
        let same = rho(&fin(sigma(3, 1.0)), &fin(sigma(3, 1.0)), &p).unwrap();
        assert_eq!(same.total.lo, 0.0);
        assert!(same.total.hi <= same.tail_bound + 1e-9);
    }

    #[test]
    fn converge_report_sigma() {
        let p = RhoParams::default();
        let target = fin(sigma(6, 1.0));
        let seq: Vec<_> = (1..=6).map(|n| fin(sigma(n, 1.0))).collect();
        let rows = slice_converge_report(&seq, &target, 4, 1.0, &p).unwrap();
        for (i, r) in rows.iter().enumerate() {
            let want = if i + 1 < 4 { 0.5 } else { 0.0 };
            assert!(r.value.contains(want), "n = {}: {:?}", i + 1, r.value);
        }
    }

    #[test]
    fn net_route_agrees_on_small_cases() {
        let a = fin(sigma(3, 1.0));
        let b = fin(sigma(2, 1.0));
        let (iv, cert) = rho_n_net(&a, &b, 3, 0.25, 10_000).unwrap();
        assert!(cert);
        assert!(iv.contains(0.5), "{iv:?}");
    }

    #[test]
    fn sampled_configurations_are_flagged() {
        let path = FiniteSpace::from_fn(30, |i, j| ExtReal::Finite((j - i) as f64 * 0.1)).unwrap();
        let (configs, complete) = configurations(&path, None, 5, 100, 40, 7);
        assert!(!complete);
        assert!(configs.len() <= 40 && configs.iter().all(|c| c.len() == 5));
        let (configs, complete) = configurations(&path, Some(3), 3, 1000, 40, 7);
        assert!(complete);
        assert_eq!(configs.len(), 29 * 28 / 2);
        assert!(configs.iter().all(|c| c[0] == 3));
    }
}
