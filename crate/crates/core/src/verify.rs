//! The acceptance checks, runnable one at a time. Each returns a pass flag
//! and a one-line summary of the worst case it met. Tolerances are fixed
//! here and nowhere else.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::ext::ExtReal;
use crate::experiments::{sequence_table, SeqMetric};
use crate::gh::{gh_bounds, gh_exact, DEFAULT_BUDGET};
use crate::grid::{downward_closure, GridMetric};
use crate::interval::Interval;
use crate::lipschitz::{is_one_lipschitz, mcshane_fix, transfer_net, CoordinateMap};
use crate::metric::{FiniteSpace, PointedSpace};
use crate::oracle::{oracle_gh, oracle_hausdorff, oracle_slice_at};
use crate::order::{equivalent, precsim, widening_defect, DEFAULT_LIMIT};
use crate::pointed::{rescaled_ball_rho, rho0, rho_pointed, QuadratureScheme};
use crate::pyramid::{member, rho, rho_n, slice_net, PointedHandle, PyramidHandle, RhoEstimate, RhoParams};
use crate::zoo::{corpus, generate, CorpusEntry, Generated, SpaceRecipe};

/// GH agreement with the oracle.
pub const GH_ORACLE_TOL: f64 = 1e-12;
/// Generic rounding slack for inequalities.
pub const SLACK: f64 = 1e-9;
/// Largest admissible width of the ρ(Σ_m, Σ_n) enclosures.
pub const SIGMA_WIDTH: f64 = 0.08;
/// Minimum certified gh lower bound between the two spiders.
pub const SPIDER_GH_LO: f64 = 0.4;
/// Leg density of the discretized spaces used for the ball modulus.
pub const BALL_DENSITY: usize = 8;
/// Directedness and downward-closure probes per sampled net.
pub const PROBES: usize = 200;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub params: RhoParams,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 2024, params: RhoParams::default() }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] C{:02} {}: {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

type Check = fn(&VerifyConfig) -> Result<(bool, String)>;

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    check: Check,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "oracle equivalence", check: c01_oracles },
        Criterion { id: 2, name: "rho <= 3 d_GH", check: c02_lipschitz },
        Criterion { id: 3, name: "sigma closed form", check: c03_sigma },
        Criterion { id: 4, name: "spider separation", check: c04_spiders },
        Criterion { id: 5, name: "transfer constant", check: c05_transfer },
        Criterion { id: 6, name: "mcshane contract", check: c06_mcshane },
        Criterion { id: 7, name: "rho range", check: c07_range },
        Criterion { id: 8, name: "pointed scaling", check: c08_scaling },
        Criterion { id: 9, name: "ball modulus", check: c09_balls },
        Criterion { id: 10, name: "long-space maximality", check: c10_long_paths },
        Criterion { id: 11, name: "rho0 comparison", check: c11_rho0 },
        Criterion { id: 12, name: "pyramid axioms on nets", check: c12_axioms },
        Criterion { id: 13, name: "equivalence consistency", check: c13_equivalence },
    ]
}

pub fn run_criterion(c: &Criterion, cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let (passed, detail) = match (c.check)(cfg) {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport { id: c.id, name: c.name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CriterionReport> {
    criteria().iter().map(|c| run_criterion(c, cfg)).collect()
}

fn fin(x: &FiniteSpace<f64>) -> PyramidHandle<f64> {
    PyramidHandle::Finite(x.clone())
}

fn pfin(x: PointedSpace<f64>) -> PointedHandle<f64> {
    PointedHandle::Finite(x)
}

fn sigma(n: usize, d: f64) -> FiniteSpace<f64> {
    FiniteSpace::from_fn(n, |_, _| ExtReal::Finite(d)).expect("valid")
}

fn recipe(r: SpaceRecipe) -> Result<Generated<f64>> {
    generate(&r)
}

/// Unordered pairs `i <= j`.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

fn c01_oracles(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let randoms: Vec<(FiniteSpace<f64>, FiniteSpace<f64>)> = (0..500)
        .map(|_| {
            let draw = |rng: &mut ChaCha8Rng| {
                let r = SpaceRecipe::RandomMetric { n: rng.random_range(1..=4), seed: rng.random() };
                recipe(r).map(|g| g.space)
            };
            Ok((draw(&mut rng)?, draw(&mut rng)?))
        })
        .collect::<Result<_>>()?;
    let gh_gap = randoms
        .par_iter()
        .map(|(x, y)| {
            let e = gh_exact(x, y, DEFAULT_LIMIT)?.value;
            let o = oracle_gh(x, y)?;
            Ok((e.lo - o).abs().max((e.hi - o).abs()))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let delta = cfg.params.delta;
    let mut handles: Vec<PyramidHandle<f64>> = corpus::<f64>(cfg.seed).iter().map(|e| fin(&e.space)).collect();
    handles.push(PyramidHandle::MaxSentinel);
    let mut misses = 0usize;
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for n in 1..=3 {
        let slices: Vec<Vec<usize>> = handles.par_iter().map(|h| oracle_slice_at(h, n, delta)).collect::<Result<_>>()?;
        let results: Vec<(bool, f64)> = pairs(handles.len())
            .par_iter()
            .map(|&(i, j)| {
                let o = oracle_hausdorff(&slices[i], &slices[j], n, delta)?;
                let v = rho_n(&handles[i], &handles[j], n, &cfg.params)?.value;
                let off = (v.lo - o).max(o - v.hi).max(0.0);
                Ok((v.contains_tol(o, delta + GH_ORACLE_TOL), off))
            })
            .collect::<Result<_>>()?;
        checked += results.len();
        misses += results.iter().filter(|r| !r.0).count();
        worst = results.iter().map(|r| r.1).fold(worst, f64::max);
    }
    let pass = gh_gap <= GH_ORACLE_TOL && misses == 0;
    Ok((
        pass,
        format!(
            "500 gh pairs, max |gh_exact - oracle| = {gh_gap:.1e}; {checked} rho_N checks (N <= 3, delta {delta}), \
             {misses} outside, max distance to oracle {worst:.3}"
        ),
    ))
}

fn c02_lipschitz(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let small: Vec<CorpusEntry<f64>> = corpus(cfg.seed).into_iter().filter(|e| e.len() <= 4).collect();
    let rows: Vec<f64> = pairs(small.len())
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&small[i].space, &small[j].space);
            let gh = gh_exact(x, y, DEFAULT_LIMIT)?.value.hi;
            let r = rho(&fin(x), &fin(y), &cfg.params)?;
            Ok(r.total.lo - 3.0 * gh)
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((worst <= SLACK, format!("{} pairs, max rho.lo - 3 gh = {worst:.4}", rows.len())))
}

fn c03_sigma(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let p = RhoParams { n_max: 8, delta: 0.25, ..cfg.params.clone() };
    let mut ok = true;
    let mut widest = 0.0f64;
    let mut oracle_off = 0.0f64;
    for m in 1..=5 {
        for n in (m + 1)..=5 {
            let (a, b) = (fin(&sigma(m, 1.0)), fin(&sigma(n, 1.0)));
            let r = rho(&a, &b, &p)?;
            let want = 0.5f64.powi(m as i32 + 1);
            ok &= r.total.contains(want) && r.total.width() <= SIGMA_WIDTH;
            widest = widest.max(r.total.width());
            for level in 1..=3 {
                let o = oracle_hausdorff(
                    &oracle_slice_at(&a, level, p.delta)?,
                    &oracle_slice_at(&b, level, p.delta)?,
                    level,
                    p.delta,
                )?;
                let v = r.per_n[&level];
                ok &= v.contains_tol(o, p.delta);
                oracle_off = oracle_off.max((v.lo - o).max(o - v.hi).max(0.0));
            }
        }
    }
    Ok((ok, format!("10 pairs contain 2^(-m-1); widest interval {widest:.4}; grid oracle offset {oracle_off:.3}")))
}

fn c04_spiders(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let spider = |n| recipe(SpaceRecipe::Spider { n, r: 1.0, k: 2 });
    let gh = gh_bounds(&spider(8)?.space, &spider(16)?.space, DEFAULT_BUDGET)?.value;
    let terms: Vec<(String, Generated<f64>)> =
        [2, 4, 8, 16].iter().map(|&n| Ok((format!("Sp{n}"), spider(n)?))).collect::<Result<_>>()?;
    let rows = sequence_table(&terms, &spider(64)?, SeqMetric::Rho, &cfg.params, (4, 1.0))?;
    let monotone = rows.windows(2).all(|w| w[1].hi <= w[0].hi + SLACK);
    let separated = rows.last().unwrap().hi < rows[0].lo;
    let table: Vec<String> = rows.iter().map(|r| format!("{} [{:.4}, {:.4}]", r.label, r.lo, r.hi)).collect();
    Ok((
        gh.lo >= SPIDER_GH_LO && monotone && separated,
        format!("gh(Sp8, Sp16) in [{:.3}, {:.3}]; rho to Sp64: {}", gh.lo, gh.hi, table.join(", ")),
    ))
}

fn c05_transfer(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let small: Vec<CorpusEntry<f64>> = corpus(cfg.seed).into_iter().filter(|e| e.len() <= 5).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
    let triples: Vec<(usize, usize, f64)> = (0..200)
        .map(|_| (rng.random_range(0..small.len()), rng.random_range(0..small.len()), [1.0, 1.25, 2.0][rng.random_range(0..3)]))
        .collect();
    let rows: Vec<(bool, f64)> = triples
        .par_iter()
        .map(|&(i, j, stretch)| {
            let (yp, x) = (&small[i].space, &small[j].space);
            let defect = widening_defect(yp, x, DEFAULT_LIMIT)?.defect.to_float();
            let eps = defect / 2.0 * stretch;
            let cap = yp.diameter().to_float().max(SLACK);
            let out = transfer_net(yp, x, eps, cap)?;
            let gh = gh_exact(&out, yp, DEFAULT_LIMIT)?.value.hi;
            let below = precsim(&out, x, SLACK)?;
            Ok((below && out.len() <= yp.len() && gh <= 3.0 * eps + SLACK, gh - 3.0 * eps))
        })
        .collect::<Result<_>>()?;
    let fails = rows.iter().filter(|r| !r.0).count();
    let worst = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    Ok((fails == 0, format!("200 triples, {fails} failures, max gh - 3 eps = {worst:.4}")))
}

fn c06_mcshane(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 6);
    let mut fails = 0;
    for _ in 0..200 {
        let x = recipe(SpaceRecipe::RandomMetric { n: rng.random_range(2..=7), seed: rng.random() })?.space;
        let dim = rng.random_range(1..=4);
        // Multiples of 1/16 keep every sum and difference exact.
        let values = (0..x.len())
            .map(|_| (0..dim).map(|_| rng.random_range(-64i32..=64) as f64 / 16.0).collect())
            .collect();
        let f = CoordinateMap { values };
        let eps = f.lipschitz_excess(|i, j| x.df(i, j));
        let g = mcshane_fix(&x, &f, eps)?;
        if !(is_one_lipschitz(&x, &g, 0.0) && g.sup_gap(&f) <= eps) {
            fails += 1;
        }
    }
    Ok((fails == 0, format!("200 instances, {fails} violations at zero tolerance")))
}

fn range_ok(r: &RhoEstimate<f64>) -> bool {
    let hi_ok = r.total.hi <= 2.0 + r.tail_bound + SLACK && r.total_hi_certified <= 2.0 + r.tail_bound + SLACK;
    hi_ok && r.per_n.iter().all(|(&n, v)| v.lo >= 0.0 && v.hi <= n as f64)
}

fn c07_range(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let entries = corpus::<f64>(cfg.seed);
    let mut plain: Vec<PyramidHandle<f64>> = entries.iter().map(|e| fin(&e.space)).collect();
    plain.push(PyramidHandle::MaxSentinel);
    plain.push(PyramidHandle::Finite(FiniteSpace::from_fn(3, |_, _| ExtReal::INF)?));
    let step = 3;
    let plain_pairs: Vec<(usize, usize)> = pairs(plain.len()).into_iter().filter(|(i, j)| (i + j) % step == 0).collect();
    let mut estimates: Vec<RhoEstimate<f64>> =
        plain_pairs.par_iter().map(|&(i, j)| rho(&plain[i], &plain[j], &cfg.params)).collect::<Result<_>>()?;
    let mut pointed: Vec<PointedHandle<f64>> = entries.iter().map(|e| pfin(e.pointed())).collect();
    pointed.push(PointedHandle::MaxSentinel);
    let pointed_pairs: Vec<(usize, usize)> = pairs(pointed.len()).into_iter().filter(|(i, j)| (i + j) % step == 1).collect();
    estimates.extend(
        pointed_pairs
            .par_iter()
            .map(|&(i, j)| rho_pointed(&pointed[i], &pointed[j], &cfg.params))
            .collect::<Result<Vec<_>>>()?,
    );
    let bad = estimates.iter().filter(|r| !range_ok(r)).count();
    let top = estimates.iter().map(|r| r.total.hi).fold(0.0, f64::max);
    Ok((bad == 0, format!("{} estimates, {bad} out of range, largest hi {top:.4}", estimates.len())))
}

fn c08_scaling(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let entries = corpus::<f64>(cfg.seed);
    let take: Vec<&CorpusEntry<f64>> = entries.iter().take(50).collect();
    let factors = [0.5, 0.8, 1.0, 1.25];
    let mut jobs = Vec::new();
    for i in 0..take.len() {
        for (a, &s) in factors.iter().enumerate() {
            for &t in &factors[a + 1..] {
                jobs.push((i, s, t));
            }
        }
    }
    let rows: Vec<f64> = jobs
        .par_iter()
        .map(|&(i, s, t)| {
            let x = take[i].pointed();
            let r = rho_pointed(&pfin(x.scale(s)), &pfin(x.scale(t)), &cfg.params)?;
            let bound = 0.5 * x.space.diameter().to_float() * (s - t).abs();
            Ok(r.total.lo - bound)
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((worst <= SLACK && take.len() == 50, format!("{} instances x 6 scale pairs, max lo - bound = {worst:.4}", take.len())))
}

fn c09_balls(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let k = BALL_DENSITY;
    let spider = |n, r: f64| recipe(SpaceRecipe::Spider { n, r, k: (r * k as f64) as usize });
    let path = |l: f64| recipe(SpaceRecipe::Path { length: l, k: (l * k as f64) as usize });
    let spaces: Vec<(&str, Generated<f64>, Generated<f64>)> = vec![
        ("Sp3 vs path2", spider(3, 1.0)?, path(2.0)?),
        ("Sp2 vs Sp4", spider(2, 1.0)?, spider(4, 1.0)?),
        ("path1 vs Sp3", path(1.0)?, spider(3, 1.0)?),
    ];
    let spacing = 1.0 / k as f64;
    let radii = [0.5, 0.75, 1.0, 1.5, 2.0];
    let mut worst = f64::NEG_INFINITY;
    for (_, a, b) in &spaces {
        let vals: Vec<Interval<f64>> = radii
            .par_iter()
            .map(|&r| rescaled_ball_rho(&a.pointed(), &b.pointed(), r, &cfg.params).map(|e| e.total))
            .collect::<Result<_>>()?;
        for i in 0..radii.len() {
            for j in (i + 1)..radii.len() {
                let (r1, r2) = (radii[i], radii[j]);
                let allowed = 8.0 * (1.0 - r2 / r1).abs() + vals[i].width() + vals[j].width() + 2.0 * spacing / r1;
                worst = worst.max((vals[i].mid() - vals[j].mid()).abs() - allowed);
            }
        }
    }
    Ok((worst <= SLACK, format!("3 pairs x 10 radius pairs, max excess over modulus {worst:.4}")))
}

fn c10_long_paths(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut ok = true;
    let mut cells = Vec::new();
    for r in [4.0f64, 9.0, 16.0] {
        let path = recipe(SpaceRecipe::Path { length: r, k: 4 * r as usize })?.pointed();
        let est = rho_pointed(&pfin(path), &PointedHandle::MaxSentinel, &cfg.params)?;
        let bound = (2.0 + r.sqrt()) * 2f64.powf(1.0 - r.sqrt());
        ok &= est.total.lo <= bound + SLACK;
        cells.push(format!("R={r}: lo {:.4} <= {bound:.4}", est.total.lo));
    }
    Ok((ok, cells.join("; ")))
}

fn c11_rho0(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let entries: Vec<PointedSpace<f64>> = corpus::<f64>(cfg.seed)
        .iter()
        .map(CorpusEntry::pointed)
        .filter(|p| p.radius() <= ExtReal::Finite(1.0))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 11);
    let mut chosen: BTreeSet<(usize, usize)> = BTreeSet::new();
    while chosen.len() < 20 {
        let (i, j) = (rng.random_range(0..entries.len()), rng.random_range(0..entries.len()));
        if i != j {
            chosen.insert((i.min(j), i.max(j)));
        }
    }
    let c = 4.0 / ((-1.0f64).exp() - (-4.0f64).exp());
    let scheme = QuadratureScheme::default();
    let rows: Vec<f64> = chosen
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&entries[i], &entries[j]);
            let r = rho_pointed(&pfin(a.clone()), &pfin(b.clone()), &cfg.params)?;
            let z = rho0(a, b, &scheme, &cfg.params)?;
            Ok(r.total.lo - c * z.total.hi)
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((worst <= SLACK, format!("20 pairs with radius <= 1, max lo - {c:.2} rho0.hi = {worst:.4}")))
}

fn grid_key(e: &FiniteSpace<f64>, delta: f64, steps: u32) -> GridMetric {
    GridMetric::floor_closure(e, delta, steps).canonical(false)
}

/// Members of `b`'s net seen from the union of witnesses of `a` and `b`:
/// the subspace of `x` hit by both maps, truncated at `cap`, dominates both.
fn directed_pair_ok(x: &FiniteSpace<f64>, a: &FiniteSpace<f64>, b: &FiniteSpace<f64>, cap: f64, n: usize) -> Result<bool> {
    let fa = widening_defect(a, x, DEFAULT_LIMIT)?;
    let fb = widening_defect(b, x, DEFAULT_LIMIT)?;
    let idx: BTreeSet<usize> = fa.witness.assignment.iter().chain(&fb.witness.assignment).copied().collect();
    let idx: Vec<usize> = idx.into_iter().collect();
    let z = x.restrict(&idx).truncate(cap);
    Ok(z.len() <= 2 * n
        && z.diameter() <= ExtReal::Finite(cap)
        && member(&z, &fin(x), SLACK)?
        && precsim(a, &z, SLACK)?
        && precsim(b, &z, SLACK)?)
}

fn c12_axioms(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let delta = cfg.params.delta;
    let entries = corpus::<f64>(cfg.seed);
    let mut failures = 0usize;
    let mut probes = 0usize;
    for (ei, e) in entries.iter().enumerate() {
        let x = &e.space;
        for n in 1..=5usize {
            let cap = n as f64;
            let steps = (cap / delta).round() as u32;
            let net = slice_net(&fin(x), n, cap, delta, cfg.params.budget)?;
            let members = net.elements.par_iter().map(|a| member(a, &fin(x), SLACK)).collect::<Result<Vec<bool>>>()?;
            failures += members.iter().filter(|m| !**m).count();
            probes += members.len();
            if n <= 3 {
                // Exhaustive: net closed downward, and every pair directed.
                let keys: BTreeSet<GridMetric> = net.elements.iter().map(|a| grid_key(a, delta, steps)).collect();
                for a in &net.elements {
                    let below = downward_closure(&grid_key(a, delta, steps), false);
                    probes += below.len();
                    failures += below.iter().filter(|g| !keys.contains(g)).count();
                }
                let all_pairs = pairs(net.len());
                probes += all_pairs.len();
                let ok = all_pairs
                    .par_iter()
                    .map(|&(i, j)| directed_pair_ok(x, &net.elements[i], &net.elements[j], cap, n))
                    .collect::<Result<Vec<bool>>>()?;
                failures += ok.iter().filter(|v| !**v).count();
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((ei as u64) << 8) ^ n as u64);
                let mut lower = Vec::with_capacity(PROBES);
                let mut pair_probes = Vec::with_capacity(PROBES);
                for _ in 0..PROBES {
                    let top = grid_key(&net.elements[rng.random_range(0..net.len())], delta, steps);
                    lower.push(random_below(&top, &mut rng).to_space(delta));
                    pair_probes.push((rng.random_range(0..net.len()), rng.random_range(0..net.len())));
                }
                probes += 2 * PROBES;
                let down = lower.par_iter().map(|a| member(a, &fin(x), SLACK)).collect::<Result<Vec<bool>>>()?;
                failures += down.iter().filter(|v| !**v).count();
                let dir = pair_probes
                    .par_iter()
                    .map(|&(i, j)| directed_pair_ok(x, &net.elements[i], &net.elements[j], cap, n))
                    .collect::<Result<Vec<bool>>>()?;
                failures += dir.iter().filter(|v| !**v).count();
            }
        }
    }
    Ok((failures == 0, format!("{} spaces, N = 1..5, {probes} probes, {failures} failures", entries.len())))
}

/// A random grid metric entrywise below `top` on a random subset of its
/// points: entries drawn below the top, then closed under shortest paths,
/// which only lowers them.
fn random_below(top: &GridMetric, rng: &mut ChaCha8Rng) -> GridMetric {
    let n = top.len();
    let keep: Vec<usize> = (0..n).filter(|&i| i == 0 || rng.random_bool(0.8)).collect();
    let sub = top.restrict(&keep);
    let m = sub.len();
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            let v = rng.random_range(1..=sub.get(i, j).max(1)) as f64;
            d[i * m + j] = v;
            d[j * m + i] = v;
        }
    }
    close_unit(m, &d)
}

fn close_unit(m: usize, d: &[f64]) -> GridMetric {
    let mut e: Vec<u32> = d.iter().map(|&v| v as u32).collect();
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = e[i * m + k] + e[k * m + j];
                if via < e[i * m + j] {
                    e[i * m + j] = via;
                }
            }
        }
    }
    GridMetric::new(m, e)
}

fn c13_equivalence(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let entries = corpus::<f64>(cfg.seed);
    let mut jobs: Vec<(FiniteSpace<f64>, FiniteSpace<f64>)> =
        pairs(entries.len()).into_iter().map(|(i, j)| (entries[i].space.clone(), entries[j].space.clone())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 13);
    for e in &entries {
        let mut perm: Vec<usize> = (0..e.len()).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        jobs.push((e.space.clone(), e.space.permute(&perm)));
    }
    let rows: Vec<(bool, bool)> = jobs
        .par_iter()
        .map(|(x, y)| {
            let eq = equivalent(x, y, SLACK)?;
            let r = rho(&fin(x), &fin(y), &cfg.params)?;
            let slack = r.tail_bound + SLACK;
            let zero = r.total.lo == 0.0 && r.total.hi <= 2.0 * slack;
            let isometric = !eq || gh_exact(x, y, DEFAULT_LIMIT)?.value.hi == 0.0;
            Ok((eq == zero && isometric, eq))
        })
        .collect::<Result<_>>()?;
    let bad = rows.iter().filter(|r| !r.0).count();
    let eqs = rows.iter().filter(|r| r.1).count();
    Ok((bad == 0, format!("{} pairs ({eqs} equivalent), {bad} inconsistent", rows.len())))
}
