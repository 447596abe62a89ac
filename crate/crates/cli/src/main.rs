use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pyramid_core::experiments::{sequence_table, SeqMetric};
use pyramid_core::gh::{gh_bounds, gh_exact};
use pyramid_core::io::{read_space_file, write_space_file, SpaceFile};
use pyramid_core::pointed::{rho0, rho_pointed, QuadratureScheme};
use pyramid_core::pyramid::{rho, PointedHandle, PyramidHandle, RhoEstimate, RhoParams};
use pyramid_core::verify::{criteria, run_criterion, VerifyConfig};
use pyramid_core::zoo::{generate, Generated, SpaceRecipe};
use pyramid_core::Error;

/// Distances between pyramids of finite metric spaces.
#[derive(Parser)]
#[command(name = "pyramid-gh", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Largest slice index summed exactly.
    #[arg(long, global = true, default_value_t = 8)]
    nmax: usize,
    /// Grid step for slice nets.
    #[arg(long, global = true, default_value_t = 0.25)]
    delta: f64,
    /// Configuration budget per slice (and node budget for `gh --bounds`).
    #[arg(long, global = true, default_value_t = 20_000)]
    budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a space from a recipe, or inspect a space file.
    Space {
        /// Recipe such as `spider:8:1:2`, or a file with `--inspect`.
        source: String,
        #[arg(long)]
        inspect: bool,
        /// Where to write the generated space file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Gromov-Hausdorff distance.
    Gh {
        a: String,
        b: String,
        #[arg(long, conflicts_with = "bounds")]
        exact: bool,
        #[arg(long)]
        bounds: bool,
        /// Node limit for the exact search.
        #[arg(long, default_value_t = 200_000)]
        limit: u64,
    },
    /// Distance between pyramids; `max` names the maximal pyramid.
    Rho { a: String, b: String },
    /// Pointed distance at each space's basepoint.
    RhoPointed { a: String, b: String },
    /// Integrated pointed distance over rescaled balls.
    Rho0 { a: String, b: String },
    /// Distance from each term of a family to a target.
    Sequence {
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = Metric::Rho)]
        metric: Metric,
        /// Slice index for `--metric slice`.
        #[arg(long, default_value_t = 4)]
        slice_n: usize,
        /// Truncation for `--metric slice`.
        #[arg(long, default_value_t = 1.0)]
        slice_d: f64,
        #[arg(required = true)]
        terms: Vec<String>,
    },
    /// Run the acceptance suite; exits nonzero if any criterion fails.
    Verify {
        #[arg(long, default_value = "paper")]
        suite: String,
        #[arg(long)]
        list: bool,
        /// Comma separated criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Rho,
    RhoPointed,
    Rho0,
    Slice,
}

impl From<Metric> for SeqMetric {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Rho => SeqMetric::Rho,
            Metric::RhoPointed => SeqMetric::RhoPointed,
            Metric::Rho0 => SeqMetric::Rho0,
            Metric::Slice => SeqMetric::Slice,
        }
    }
}

enum Operand {
    Max,
    Space(Generated<f64>),
}

/// `max`, an existing space file, or a recipe.
fn load(arg: &str) -> Result<Operand> {
    if arg.eq_ignore_ascii_case("max") {
        return Ok(Operand::Max);
    }
    Ok(Operand::Space(load_space(arg)?))
}

fn load_space(arg: &str) -> Result<Generated<f64>> {
    if Path::new(arg).is_file() {
        let f = read_space_file(arg).with_context(|| format!("reading {arg}"))?;
        let space = f.space().map_err(|e| describe(e, arg))?;
        if let Some(b) = f.base {
            if b >= space.len() {
                bail!("{arg}: base {b} out of range for {} points", space.len());
            }
        }
        return Ok(Generated { space, base: f.base });
    }
    let recipe: SpaceRecipe = arg.parse().with_context(|| format!("{arg:?} is neither a file nor a recipe"))?;
    Ok(generate(&recipe)?)
}

fn describe(e: Error, what: &str) -> anyhow::Error {
    match e {
        Error::Invalid(v) => {
            let lines: Vec<String> = v.iter().map(|x| format!("  {x}")).collect();
            anyhow::anyhow!("{what} is not a metric space:\n{}", lines.join("\n"))
        }
        e => anyhow::Error::new(e).context(what.to_owned()),
    }
}

fn plain(o: &Operand) -> PyramidHandle<f64> {
    match o {
        Operand::Max => PyramidHandle::MaxSentinel,
        Operand::Space(g) => PyramidHandle::Finite(g.space.clone()),
    }
}

fn pointed(o: &Operand) -> PointedHandle<f64> {
    match o {
        Operand::Max => PointedHandle::MaxSentinel,
        Operand::Space(g) => PointedHandle::Finite(g.pointed()),
    }
}

fn finite<'a>(o: &'a Operand, cmd: &str) -> Result<&'a Generated<f64>> {
    match o {
        Operand::Space(g) => Ok(g),
        Operand::Max => bail!("`{cmd}` needs finite spaces, not `max`"),
    }
}

fn params(c: &Common) -> Result<RhoParams> {
    let p = RhoParams {
        n_max: c.nmax,
        delta: c.delta,
        tol: c.tol,
        budget: c.budget,
        seed: c.seed,
        ..RhoParams::default()
    };
    p.validate()?;
    Ok(p)
}

fn csv(schema: &str, header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("# schema: {schema}\n{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn rho_report(e: &RhoEstimate<f64>, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&e.to_json()).unwrap(),
        Format::Csv => {
            let mut rows: Vec<String> = e
                .per_n
                .iter()
                .map(|(n, v)| format!("{n},{},{},{}", v.lo, v.hi, e.per_n_hi_certified[n]))
                .collect();
            rows.push(format!("tail,0,{},{}", e.tail_bound, e.tail_bound));
            rows.push(format!("total,{},{},{}", e.total.lo, e.total.hi, e.total_hi_certified));
            csv("pyramid-gh/rho/v1", "N,lo,hi,hi_certified", rows)
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{}\n", text.trim_end())).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut o = std::io::stdout().lock();
            writeln!(o, "{}", text.trim_end())?;
            Ok(())
        }
    }
}

fn space_cmd(c: &Common, source: &str, inspect: bool, save: &Option<PathBuf>) -> Result<String> {
    let g = if inspect {
        let f = read_space_file(source).with_context(|| format!("reading {source}"))?;
        let space = f.space::<f64>().map_err(|e| describe(e, source))?;
        Generated { space, base: f.base }
    } else {
        let recipe: SpaceRecipe = source.parse()?;
        generate(&recipe)?
    };
    if let Some(path) = save {
        write_space_file(path, &SpaceFile::from_space(&g.space, g.base))?;
    }
    let p = g.pointed();
    let (n, diam, rad) = (g.space.len(), g.space.diameter(), p.radius());
    Ok(match c.format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "n": n, "diam": diam, "rad": rad, "base": p.base(), "label": g.space.label(),
        }))?,
        Format::Csv => csv("pyramid-gh/space/v1", "n,diam,rad,base", [format!("{n},{diam},{rad},{}", p.base())]),
    })
}

fn gh_cmd(c: &Common, a: &str, b: &str, bounds: bool, limit: u64) -> Result<String> {
    let (x, y) = (load_space(a)?.space, load_space(b)?.space);
    let r = if bounds {
        gh_bounds(&x, &y, c.budget)?
    } else {
        gh_exact(&x, &y, limit).map_err(|e| match e {
            Error::SizeLimitExceeded { .. } => anyhow::Error::new(e).context("exact search too large; rerun with --bounds"),
            e => e.into(),
        })?
    };
    Ok(match c.format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "lo": r.value.lo, "hi": r.value.hi, "method": r.method,
            "witness": r.witness.map(|w| w.pairs),
        }))?,
        Format::Csv => csv("pyramid-gh/gh/v1", "lo,hi", [format!("{},{}", r.value.lo, r.value.hi)]),
    })
}

fn rho0_cmd(c: &Common, a: &str, b: &str) -> Result<String> {
    let (oa, ob) = (load(a)?, load(b)?);
    let (ga, gb) = (finite(&oa, "rho0")?, finite(&ob, "rho0")?);
    let r = rho0(&ga.pointed(), &gb.pointed(), &QuadratureScheme::default(), &params(c)?)?;
    Ok(match c.format {
        Format::Json => serde_json::to_string_pretty(&r.to_json())?,
        Format::Csv => {
            let mut rows: Vec<String> = r.nodes.iter().map(|n| format!("{},{},{}", n.r, n.lo, n.hi)).collect();
            rows.push(format!("lower_tail,0,{}", r.lower_tail));
            rows.push(format!("upper_tail,0,{}", r.upper_tail));
            rows.push(format!("total,{},{}", r.total.lo, r.total.hi));
            csv("pyramid-gh/rho0/v1", "r,lo,hi", rows)
        }
    })
}

fn sequence_cmd(c: &Common, target: &str, metric: Metric, slice: (usize, f64), terms: &[String]) -> Result<String> {
    let target = load_space(target)?;
    let family: Vec<(String, Generated<f64>)> =
        terms.iter().map(|t| Ok((t.clone(), load_space(t)?))).collect::<Result<_>>()?;
    let rows = sequence_table(&family, &target, metric.into(), &params(c)?, slice)?;
    Ok(match c.format {
        Format::Json => serde_json::to_string_pretty(&rows)?,
        Format::Csv => csv(
            "pyramid-gh/sequence/v1",
            "label,lo,hi,hi_certified,certified,seconds",
            rows.iter().map(|r| {
                format!("{},{},{},{},{},{:.3}", r.label, r.lo, r.hi, r.hi_certified, r.certified, r.seconds)
            }),
        ),
    })
}

fn verify_cmd(c: &Common, suite: &str, list: bool, only: &[u32]) -> Result<(String, bool)> {
    if suite != "paper" {
        bail!("unknown suite {suite:?}; the only suite is `paper`");
    }
    let all = criteria();
    if list {
        let lines: Vec<String> = all.iter().map(|k| format!("C{:02} {}", k.id, k.name)).collect();
        return Ok((lines.join("\n"), true));
    }
    let cfg = VerifyConfig { seed: VerifyConfig::default().seed ^ c.seed, params: params(c)? };
    let reports: Vec<_> = all
        .iter()
        .filter(|k| only.is_empty() || only.contains(&k.id))
        .map(|k| {
            let r = run_criterion(k, &cfg);
            eprintln!("{r}");
            r
        })
        .collect();
    let ok = reports.iter().all(|r| r.passed);
    let text = match c.format {
        Format::Json => serde_json::to_string_pretty(
            &reports
                .iter()
                .map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail, "seconds": r.seconds}))
                .collect::<Vec<_>>(),
        )?,
        Format::Csv => csv(
            "pyramid-gh/verify/v1",
            "id,status,name",
            reports.iter().map(|r| format!("{},{},{}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.name)),
        ),
    };
    Ok((text, ok))
}

fn run(cli: Cli) -> Result<bool> {
    let c = &cli.common;
    if let Some(t) = std::env::var("PYRAMID_GH_THREADS").ok().filter(|s| !s.is_empty()) {
        let n: usize = t.parse().context("PYRAMID_GH_THREADS must be a positive integer")?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    let (text, ok) = match &cli.cmd {
        Cmd::Space { source, inspect, save } => (space_cmd(c, source, *inspect, save)?, true),
        Cmd::Gh { a, b, exact: _, bounds, limit } => (gh_cmd(c, a, b, *bounds, *limit)?, true),
        Cmd::Rho { a, b } => (rho_report(&rho(&plain(&load(a)?), &plain(&load(b)?), &params(c)?)?, c.format), true),
        Cmd::RhoPointed { a, b } => {
            let e = rho_pointed(&pointed(&load(a)?), &pointed(&load(b)?), &params(c)?)?;
            (rho_report(&e, c.format), true)
        }
        Cmd::Rho0 { a, b } => (rho0_cmd(c, a, b)?, true),
        Cmd::Sequence { target, metric, slice_n, slice_d, terms } => {
            (sequence_cmd(c, target, *metric, (*slice_n, *slice_d), terms)?, true)
        }
        Cmd::Verify { suite, list, only } => verify_cmd(c, suite, *list, only)?,
    };
    emit(&c.out, &text)?;
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
