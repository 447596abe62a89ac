//! Example families and the shared test corpus.
//!
//! Randomized families use ChaCha8 seeded from the recipe, so a recipe
//! always produces the same matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::metric::{FiniteSpace, PointedSpace};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpaceRecipe {
    /// `n` points pairwise at distance `d` (possibly `"inf"`).
    Sigma { n: usize, d: ExtReal<f64> },
    /// `n` legs of length `r`, each with `k` nodes, glued at a center.
    Spider { n: usize, r: f64, k: usize },
    /// Uniform samples on `S^dim` with the arc metric.
    Sphere { dim: usize, samples: usize, seed: u64 },
    /// Samples on `S^dim` with antipodes identified.
    ProjSpace { dim: usize, samples: usize, seed: u64 },
    /// Sampled `n`-tuples of points of `base` under the `l^p` metric
    /// (`p` may be `"inf"`).
    LpProduct { base: Box<SpaceRecipe>, n: usize, p: ExtReal<f64>, samples: usize, seed: u64 },
    /// `k + 1` equally spaced points on a segment of length `length`.
    Path { length: f64, k: usize },
    /// Random symmetric matrix closed under shortest paths.
    RandomMetric { n: usize, seed: u64 },
    /// Vertex skeleton of the standard `dim`-simplex, `Σ_{dim+1}(1)`.
    Simplex { dim: usize },
}

/// A generated space with its canonical basepoint, if the family has one.
#[derive(Clone, Debug)]
pub struct Generated<T: Scalar> {
    pub space: FiniteSpace<T>,
    pub base: Option<usize>,
}

impl<T: Scalar> Generated<T> {
    /// Pointed at the canonical base, or at point 0.
    pub fn pointed(&self) -> PointedSpace<T> {
        PointedSpace::new(self.space.clone(), self.base.unwrap_or(0)).expect("nonempty")
    }
}

fn bad(msg: &str) -> Error {
    Error::InvalidRecipe(msg.into())
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(&format!("{what} must be positive and finite")))
    }
}

/// Shortest-path closure, then validation. Used for sampled families,
/// where closure only absorbs rounding error.
fn closed(n: usize, mut d: Vec<f64>) -> Result<FiniteSpace<f64>> {
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    let rows: Vec<Vec<f64>> = d.chunks(n).map(<[f64]>::to_vec).collect();
    FiniteSpace::from_finite(&rows)
}

fn sphere_points(dim: usize, m: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| loop {
            let v: Vec<f64> = (0..=dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-9 {
                break v.iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

/// Angle between unit vectors, `2 atan2(|u - v|, |u + v|)`, which stays
/// accurate near 0 and π where `acos` of the dot product does not.
fn angle(u: &[f64], v: &[f64]) -> f64 {
    let minus = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let plus = u.iter().zip(v).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
    2.0 * minus.atan2(plus)
}

fn generate_f64(r: &SpaceRecipe) -> Result<Generated<f64>> {
    use SpaceRecipe::*;
    match r {
        Sigma { n, d } => {
            if *n == 0 {
                return Err(bad("sigma needs n >= 1"));
            }
            let d = *d;
            if let ExtReal::Finite(v) = d {
                positive(v, "sigma distance")?;
            }
            let space = FiniteSpace::from_fn(*n, |_, _| d)?;
            Ok(Generated { space, base: None })
        }
        Simplex { dim } => generate_f64(&Sigma { n: dim + 1, d: ExtReal::Finite(1.0) }),
        Spider { n, r, k } => {
            positive(*r, "spider leg length")?;
            if *n == 0 || *k == 0 {
                return Err(bad("spider needs n >= 1 legs and k >= 1 nodes per leg"));
            }
            let step = r / *k as f64;
            // Point 0 is the center; leg l, node s (1-based) sits at 1 + l k + s - 1.
            let loc = |i: usize| if i == 0 { (usize::MAX, 0) } else { ((i - 1) / k, (i - 1) % k + 1) };
            let space = FiniteSpace::from_fn(1 + n * k, |i, j| {
                let ((li, si), (lj, sj)) = (loc(i), loc(j));
                let hops = if li == lj { si.abs_diff(sj) } else { si + sj };
                ExtReal::Finite(hops as f64 * step)
            })?;
            Ok(Generated { space, base: Some(0) })
        }
        Path { length, k } => {
            positive(*length, "path length")?;
            if *k == 0 {
                return Err(bad("path needs k >= 1"));
            }
            let step = length / *k as f64;
            let space = FiniteSpace::from_fn(k + 1, |i, j| ExtReal::Finite((j - i) as f64 * step))?;
            Ok(Generated { space, base: Some(0) })
        }
        Sphere { dim, samples, seed } | ProjSpace { dim, samples, seed } => {
            if *dim == 0 || *samples == 0 {
                return Err(bad("sphere needs dim >= 1 and samples >= 1"));
            }
            let pts = sphere_points(*dim, *samples, *seed);
            let projective = matches!(r, ProjSpace { .. });
            let m = pts.len();
            let mut d = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        let a = angle(&pts[i], &pts[j]);
                        d[i * m + j] = if projective { a.min(std::f64::consts::PI - a) } else { a };
                    }
                }
            }
            Ok(Generated { space: closed(m, d)?, base: None })
        }
        LpProduct { base, n, p, samples, seed } => {
            if *n == 0 || *samples == 0 {
                return Err(bad("lp product needs n >= 1 and samples >= 1"));
            }
            if let ExtReal::Finite(v) = p {
                if !(*v >= 1.0) {
                    return Err(bad("lp exponent must be >= 1"));
                }
            }
            let x = generate_f64(base)?.space;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut tuples: Vec<Vec<usize>> = Vec::new();
            let total = (x.len() as u128).saturating_pow(*n as u32);
            let want = (*samples as u128).min(total) as usize;
            let mut attempts = 0;
            while tuples.len() < want && attempts < want * 50 {
                attempts += 1;
                let t: Vec<usize> = (0..*n).map(|_| rng.random_range(0..x.len())).collect();
                if !tuples.contains(&t) {
                    tuples.push(t);
                }
            }
            let dist = |a: &[usize], b: &[usize]| -> ExtReal<f64> {
                let parts: Vec<ExtReal<f64>> = a.iter().zip(b).map(|(&i, &j)| x.d(i, j)).collect();
                if parts.iter().any(|v| v.is_inf()) {
                    return ExtReal::INF;
                }
                let vals = parts.iter().map(|v| v.to_float());
                match p {
                    ExtReal::Inf => ExtReal::Finite(vals.fold(0.0, f64::max)),
                    ExtReal::Finite(q) => ExtReal::Finite(vals.map(|v| v.powf(*q)).sum::<f64>().powf(1.0 / q)),
                }
            };
            let m = tuples.len();
            let space = FiniteSpace::from_fn(m, |i, j| dist(&tuples[i], &tuples[j]));
            match space {
                Ok(s) => Ok(Generated { space: s, base: None }),
                // Powers and roots can leave rounding-level triangle defects.
                Err(_) if p.is_finite() && x.is_finite() => {
                    let mut d = vec![0.0; m * m];
                    for i in 0..m {
                        for j in 0..m {
                            d[i * m + j] = dist(&tuples[i], &tuples[j]).to_float();
                        }
                    }
                    Ok(Generated { space: closed(m, d)?, base: None })
                }
                Err(e) => Err(e),
            }
        }
        RandomMetric { n, seed } => {
            if *n == 0 {
                return Err(bad("random metric needs n >= 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut d = vec![0.0; n * n];
            for i in 0..*n {
                for j in (i + 1)..*n {
                    // Multiples of 1/16 in [0.25, 4]: sums stay exact.
                    let v = rng.random_range(4..=64) as f64 / 16.0;
                    d[i * n + j] = v;
                    d[j * n + i] = v;
                }
            }
            Ok(Generated { space: closed(*n, d)?, base: Some(0) })
        }
    }
}

/// Compact form `family:arg:arg…`, e.g. `sigma:3:inf`, `spider:8:1:2`,
/// `path:2:4`, `random:4:7`, `sphere:2:5:1`, `proj:2:4:1`, `simplex:2`.
/// Anything starting with `{` is read as the JSON form.
impl std::str::FromStr for SpaceRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let bad = || Error::InvalidRecipe(format!("cannot parse recipe {s:?}"));
        let mut parts = s.split(':');
        let family = parts.next().ok_or_else(bad)?.to_ascii_lowercase();
        let args: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<f64> { args.get(i).and_then(|a| a.parse().ok()).ok_or_else(bad) };
        let int = |i: usize| -> Result<u64> { args.get(i).and_then(|a| a.parse().ok()).ok_or_else(bad) };
        let ext = |i: usize| -> Result<ExtReal<f64>> {
            match args.get(i) {
                Some(&"inf") => Ok(ExtReal::INF),
                _ => num(i).map(ExtReal::Finite),
            }
        };
        let arity = |k: usize| if args.len() == k { Ok(()) } else { Err(bad()) };
        use SpaceRecipe::*;
        let r = match family.as_str() {
            "sigma" => {
                arity(2)?;
                Sigma { n: int(0)? as usize, d: ext(1)? }
            }
            "spider" => {
                arity(3)?;
                Spider { n: int(0)? as usize, r: num(1)?, k: int(2)? as usize }
            }
            "path" => {
                arity(2)?;
                Path { length: num(0)?, k: int(1)? as usize }
            }
            "random" => {
                arity(2)?;
                RandomMetric { n: int(0)? as usize, seed: int(1)? }
            }
            "sphere" | "proj" => {
                arity(3)?;
                let (dim, samples, seed) = (int(0)? as usize, int(1)? as usize, int(2)?);
                if family == "sphere" {
                    Sphere { dim, samples, seed }
                } else {
                    ProjSpace { dim, samples, seed }
                }
            }
            "simplex" => {
                arity(1)?;
                Simplex { dim: int(0)? as usize }
            }
            _ => return Err(bad()),
        };
        Ok(r)
    }
}

/// Builds the space described by a recipe.
pub fn generate<T: Scalar>(r: &SpaceRecipe) -> Result<Generated<T>> {
    let g = generate_f64(r)?;
    Ok(Generated { space: g.space.cast(), base: g.base })
}

/// A named corpus member.
#[derive(Clone, Debug)]
pub struct CorpusEntry<T: Scalar> {
    pub name: String,
    pub recipe: SpaceRecipe,
    pub space: FiniteSpace<T>,
    pub base: usize,
}

impl<T: Scalar> CorpusEntry<T> {
    pub fn pointed(&self) -> PointedSpace<T> {
        PointedSpace::new(self.space.clone(), self.base).expect("base in range")
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }
}

fn name_of(r: &SpaceRecipe) -> String {
    use SpaceRecipe::*;
    match r {
        Sigma { n, d } => format!("sigma({n},{d})"),
        Spider { n, r, k } => format!("spider({n},{r},{k})"),
        Sphere { dim, samples, seed } => format!("sphere({dim},{samples},#{seed})"),
        ProjSpace { dim, samples, seed } => format!("proj({dim},{samples},#{seed})"),
        LpProduct { base, n, p, samples, seed } => format!("lp({},{n},{p},{samples},#{seed})", name_of(base)),
        Path { length, k } => format!("path({length},{k})"),
        RandomMetric { n, seed } => format!("random({n},#{seed})"),
        Simplex { dim } => format!("simplex({dim})"),
    }
}

/// Corpus recipes: `Σ_n(D)` for `n <= 5`, `D ∈ {0.5, 1, 2}`; spiders with up
/// to 4 legs and `k <= 2`; 20 random metrics on at most 5 points; paths; a
/// few sampled spheres, projective spaces and products.
pub fn corpus_recipes(seed: u64) -> Vec<SpaceRecipe> {
    use SpaceRecipe::*;
    let mut out = vec![Sigma { n: 1, d: ExtReal::Finite(1.0) }];
    for d in [0.5, 1.0, 2.0] {
        for n in 2..=5 {
            out.push(Sigma { n, d: ExtReal::Finite(d) });
        }
    }
    for n in 2..=4 {
        for k in 1..=2 {
            out.push(Spider { n, r: 1.0, k });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        out.push(RandomMetric { n: rng.random_range(2..=5), seed: rng.random() });
    }
    for (length, k) in [(1.0, 2), (2.0, 4), (3.0, 3), (1.5, 3), (0.5, 1)] {
        out.push(Path { length, k });
    }
    out.push(Spider { n: 3, r: 0.5, k: 1 });
    let s = rng.random::<u64>();
    out.push(Sphere { dim: 1, samples: 4, seed: s });
    out.push(Sphere { dim: 2, samples: 5, seed: s ^ 1 });
    out.push(Sphere { dim: 3, samples: 5, seed: s ^ 4 });
    out.push(ProjSpace { dim: 2, samples: 4, seed: s ^ 2 });
    out.push(LpProduct {
        base: Box::new(Sigma { n: 2, d: ExtReal::Finite(1.0) }),
        n: 2,
        p: ExtReal::INF,
        samples: 4,
        seed: s ^ 3,
    });
    out
}

/// The deterministic test corpus.
pub fn corpus<T: Scalar>(seed: u64) -> Vec<CorpusEntry<T>> {
    corpus_recipes(seed)
        .into_iter()
        .map(|recipe| {
            let g = generate::<T>(&recipe).expect("corpus recipes are valid");
            CorpusEntry { name: name_of(&recipe), base: g.base.unwrap_or(0), space: g.space, recipe }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(r: SpaceRecipe) -> Generated<f64> {
        generate(&r).unwrap()
    }

    #[test]
    fn sigma_and_spider() {
        let s = gen(SpaceRecipe::Sigma { n: 3, d: ExtReal::Finite(1.0) }).space;
        assert!((0..3).all(|i| (0..3).all(|j| s.df(i, j) == if i == j { 0.0 } else { 1.0 })));
        let sp = gen(SpaceRecipe::Spider { n: 2, r: 1.0, k: 1 });
        assert_eq!(sp.space.len(), 3);
        assert_eq!(sp.space.df(1, 2), 2.0);
        assert_eq!(sp.space.df(0, 1), 1.0);
        assert_eq!(sp.base, Some(0));
        for k in 1..=4 {
            let sp = gen(SpaceRecipe::Spider { n: 3, r: 1.5, k }).pointed();
            assert_eq!(sp.radius(), ExtReal::Finite(1.5));
            assert_eq!(sp.space.diameter(), ExtReal::Finite(3.0));
        }
        let inf = gen(SpaceRecipe::Sigma { n: 2, d: ExtReal::INF }).space;
        assert!(inf.d(0, 1).is_inf());
    }

    #[test]
    fn spheres_are_metric() {
        let s = gen(SpaceRecipe::Sphere { dim: 1, samples: 4, seed: 3 }).space;
        assert_eq!(s.len(), 4);
        assert!(s.diameter().to_float() <= std::f64::consts::PI + 1e-12);
        let p = gen(SpaceRecipe::ProjSpace { dim: 3, samples: 30, seed: 3 }).space;
        assert!(p.diameter().to_float() <= std::f64::consts::FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn sup_product_reaches_the_diameter() {
        let base = SpaceRecipe::Sigma { n: 3, d: ExtReal::Finite(1.0) };
        let r = SpaceRecipe::LpProduct { base: Box::new(base), n: 3, p: ExtReal::INF, samples: 12, seed: 5 };
        let s = gen(r).space;
        let off: Vec<f64> = (0..s.len()).flat_map(|i| (0..s.len()).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| s.df(i, j)).collect();
        assert!(off.iter().all(|&v| v == 1.0));
        let two = SpaceRecipe::LpProduct {
            base: Box::new(SpaceRecipe::Path { length: 1.0, k: 2 }),
            n: 2,
            p: ExtReal::Finite(2.0),
            samples: 9,
            seed: 1,
        };
        assert_eq!(gen(two).space.len(), 9);
    }

    #[test]
    fn recipes_round_trip_through_json() {
        let r: SpaceRecipe = serde_json::from_str(r#"{"family":"sigma","n":3,"d":"inf"}"#).unwrap();
        assert_eq!(r, SpaceRecipe::Sigma { n: 3, d: ExtReal::INF });
        let text = serde_json::to_string(&SpaceRecipe::Spider { n: 2, r: 1.0, k: 2 }).unwrap();
        assert_eq!(text, r#"{"family":"spider","n":2,"r":1.0,"k":2}"#);
        assert!(matches!(generate::<f64>(&SpaceRecipe::Path { length: -1.0, k: 2 }), Err(Error::InvalidRecipe(_))));
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = corpus::<f64>(11);
        let b = corpus::<f64>(11);
        assert!(a.len() >= 50);
        assert!(a.iter().zip(&b).all(|(x, y)| x.space == y.space && x.name == y.name));
    }

    #[test]
    fn compact_recipes() {
        let r: SpaceRecipe = "spider:8:1:2".parse().unwrap();
        assert_eq!(r, SpaceRecipe::Spider { n: 8, r: 1.0, k: 2 });
        let s: SpaceRecipe = "sigma:2:inf".parse().unwrap();
        assert_eq!(s, SpaceRecipe::Sigma { n: 2, d: ExtReal::INF });
        let j: SpaceRecipe = r#"{"family": "path", "length": 2.0, "k": 4}"#.parse().unwrap();
        assert_eq!(j, SpaceRecipe::Path { length: 2.0, k: 4 });
        assert!("spider:8:1".parse::<SpaceRecipe>().is_err());
        assert!("cube:3".parse::<SpaceRecipe>().is_err());
    }
}
