//! Command-line front end for `cmv-core`.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical or I/O failure.
//! Output is assembled in memory and written atomically, so a failed run
//! leaves no file behind.

pub mod emit;
pub mod presets;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use cmv_core::caratheodory::{
    approximant_sweep, convergence_presets, oracle_moments, ring_grid, sweep_to_csv, szego_rule, OracleMeasure,
    QuadratureRule,
};
use cmv_core::eig::{sigma_n, SpectrumResult};
use cmv_core::numfmt::g17;
use cmv_core::opuc::gen_u_sequence;
use cmv_core::parse::{parse_complex, parse_real};
use cmv_core::support::{
    approximate_support, bound_band, bound_diagonal, bound_halfplane, bound_ratio, bound_two_limit_points,
    bound_two_periodic, estimate_diagonal_limits, ArcBound, CandidateClass, DiagonalLimits, SupportEstimate,
};
use cmv_core::{expand, CmvError, Complex64, SchurSpec, USequenceSpec, UnitPoint};

use emit::{render, Mark, Panel};
use presets::{figure_preset, FIGURE_IDS};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(CmvError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io { .. } => 3,
        }
    }
}

impl From<CmvError> for CliError {
    fn from(e: CmvError) -> Self {
        match e {
            CmvError::Domain(m) | CmvError::Validation(m) | CmvError::Parse(m) => CliError::Config(m),
            other => CliError::Numeric(other),
        }
    }
}

fn config<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

#[derive(Debug, Parser)]
#[command(name = "cmvtrunc", version, about = "Unitary truncations of CMV matrices: spectra, support, bounds, approximants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Schur parameter spec, e.g. `constant:0.5` or `two-periodic:0.25,0.75`.
    #[arg(long)]
    params: Option<String>,
    /// u-sequence spec, e.g. `fixed-zero:1`, `const:-1`, `phase`.
    #[arg(long = "u")]
    u: Option<String>,
    /// Orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<String>,
    /// Read the orders as consecutive pairs (n, n+1).
    #[arg(long)]
    pairs: bool,
    /// Matching tolerance of the double-limit filter.
    #[arg(long)]
    eps: Option<String>,
    /// Replaces the seeds of all random parameter families.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Include the 1000/1001 figure panels.
    #[arg(long)]
    full: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand a parameter spec and dump a_n, rho_n.
    Params(Common),
    /// Spectra of the truncations for each order.
    Spectrum(Common),
    /// Double-limit support estimate over order pairs.
    Support(Common),
    /// Evaluate a closed-form arc bound.
    Bounds {
        /// `halfplane:L:A0`, `band:L:A1:A2`, `two-limit:L:A:B`, `two-periodic:L:AO:AE[:XIO:XIE]`,
        /// `ratio:L1|L2|...:M`, `diagonal:A`, or `estimate` (from --params and the largest --n).
        #[arg(long)]
        bound: String,
        #[command(flatten)]
        common: Common,
    },
    /// Para-orthogonal approximants of the Carathéodory function over a grid.
    Cf {
        /// `ring:R1,R2,...:COUNT` or `points:Z1|Z2|...`.
        #[arg(long)]
        grid: Option<String>,
        /// `lebesgue`, or `geronimus` for constant parameters.
        #[arg(long)]
        oracle: Option<String>,
        /// Named convergence scenario supplying params, u and grid.
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Szegő quadrature rules with a moment-error report.
    Quad(Common),
    /// Figure presets fig1..fig12.
    Figure {
        id: String,
        #[command(flatten)]
        common: Common,
    },
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cmvtrunc: {e}");
            e.exit_code()
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("CMV_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => b = b.num_threads(k),
            _ => return config(format!("CMV_THREADS must be a positive integer, got {v:?}")),
        }
    }
    b.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// A validated run.
enum Plan {
    Params { spec: SchurSpec, n: usize },
    Spectrum { spec: SchurSpec, uspec: USequenceSpec, orders: Vec<usize> },
    Support { spec: SchurSpec, uspec: USequenceSpec, pairs: Vec<(usize, usize)>, eps: Option<f64> },
    Bounds(BoundPlan),
    Cf { spec: SchurSpec, uspec: USequenceSpec, orders: Vec<usize>, grid: Vec<Complex64>, oracle: Option<OracleMeasure> },
    Quad { spec: SchurSpec, uspec: USequenceSpec, orders: Vec<usize> },
    Figure { id: &'static str, caption: &'static str, spec: SchurSpec, uspec: USequenceSpec, orders: Vec<usize> },
}

enum BoundPlan {
    Halfplane(UnitPoint, f64),
    Band(UnitPoint, f64, f64),
    TwoLimit(UnitPoint, Complex64, Complex64),
    TwoPeriodic(UnitPoint, Complex64, Complex64, f64, f64),
    Ratio(Vec<UnitPoint>, f64),
    Diagonal(Complex64),
    Estimate(SchurSpec, usize),
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (plan, common, default_format) = validate(cli)?;
    let format = common.format.unwrap_or(default_format);
    check_format(&plan, format)?;
    let pool = thread_pool()?;
    let body = pool.install(|| compute(&plan, format))?;
    write_output(common.out.as_deref(), &body)
}

fn check_format(plan: &Plan, format: Format) -> Result<(), CliError> {
    let svg_ok = matches!(plan, Plan::Spectrum { .. } | Plan::Support { .. } | Plan::Bounds(_) | Plan::Figure { .. });
    if format == Format::Svg && !svg_ok {
        return config("svg output is available for spectrum, support, bounds and figure");
    }
    Ok(())
}

fn validate(cli: Cli) -> Result<(Plan, Common, Format), CliError> {
    Ok(match cli.command {
        Command::Params(c) => {
            let spec = schur(&c)?;
            let n = *orders(&c)?.iter().max().expect("nonempty");
            (Plan::Params { spec, n }, c, Format::Csv)
        }
        Command::Spectrum(c) => {
            let plan = Plan::Spectrum { spec: schur(&c)?, uspec: useq(&c)?, orders: orders(&c)? };
            (plan, c, Format::Csv)
        }
        Command::Support(c) => {
            let eps = match &c.eps {
                Some(e) => {
                    let v = parse_real(e)?;
                    if !(v > 0.0) {
                        return config("--eps must be positive");
                    }
                    Some(v)
                }
                None => None,
            };
            let plan = Plan::Support { spec: schur(&c)?, uspec: useq(&c)?, pairs: pairs(&c)?, eps };
            (plan, c, Format::Csv)
        }
        Command::Bounds { bound, common } => {
            let plan = parse_bound(&bound, &common)?;
            (Plan::Bounds(plan), common, Format::Json)
        }
        Command::Cf { grid, oracle, preset, common } => {
            let chosen = match &preset {
                Some(name) => Some(
                    convergence_presets()
                        .into_iter()
                        .find(|p| p.name == name)
                        .ok_or_else(|| CliError::Config(format!("unknown convergence preset {name:?}")))?,
                ),
                None => None,
            };
            let spec = match (&common.params, &chosen) {
                (None, Some(p)) => reseed(p.spec.clone(), common.seed),
                _ => schur(&common)?,
            };
            let uspec = match (&common.u, &chosen) {
                (None, Some(p)) => p.uspec,
                _ => useq(&common)?,
            };
            let grid = match (&grid, &chosen) {
                (Some(g), _) => parse_grid(g)?,
                (None, Some(p)) => p.grid.clone(),
                (None, None) => ring_grid(&[0.5, 2.0], 16),
            };
            let oracle = match oracle.as_deref() {
                None => None,
                Some("lebesgue") => Some(OracleMeasure::Lebesgue),
                Some("geronimus") => match spec {
                    SchurSpec::Constant(a) if a.norm() < 1.0 => Some(OracleMeasure::Geronimus { a }),
                    _ => return config("the geronimus oracle needs --params constant:A with |A| < 1"),
                },
                Some(other) => return config(format!("unknown oracle {other:?}")),
            };
            let plan = Plan::Cf { spec, uspec, orders: orders(&common)?, grid, oracle };
            (plan, common, Format::Csv)
        }
        Command::Quad(c) => {
            let plan = Plan::Quad { spec: schur(&c)?, uspec: useq(&c)?, orders: orders(&c)? };
            (plan, c, Format::Csv)
        }
        Command::Figure { id, common } => {
            let p = figure_preset(&id).ok_or_else(|| {
                CliError::Config(format!("unknown figure {id:?}; expected one of {}", FIGURE_IDS.join(", ")))
            })?;
            let orders = p.orders(common.full);
            let spec = reseed(p.spec, common.seed);
            (Plan::Figure { id: p.id, caption: p.caption, spec, uspec: p.uspec, orders }, common, Format::Svg)
        }
    })
}

fn schur(c: &Common) -> Result<SchurSpec, CliError> {
    let text = c.params.as_deref().ok_or_else(|| CliError::Config("--params is required".into()))?;
    let spec = SchurSpec::parse(text)?;
    spec.check()?;
    Ok(reseed(spec, c.seed))
}

fn useq(c: &Common) -> Result<USequenceSpec, CliError> {
    let text = c.u.as_deref().ok_or_else(|| CliError::Config("--u is required".into()))?;
    Ok(USequenceSpec::parse(text)?)
}

fn orders(c: &Common) -> Result<Vec<usize>, CliError> {
    if c.n.is_empty() {
        return config("--n is required");
    }
    let mut out = Vec::with_capacity(c.n.len());
    for t in &c.n {
        match t.trim().parse::<usize>() {
            Ok(k) if k >= 1 => out.push(k),
            _ => return config(format!("orders must be positive integers, got {t:?}")),
        }
    }
    Ok(out)
}

fn pairs(c: &Common) -> Result<Vec<(usize, usize)>, CliError> {
    let o = orders(c)?;
    if !c.pairs {
        return Ok(o.iter().map(|&n| (n, n + 1)).collect());
    }
    if o.len() % 2 != 0 {
        return config("--pairs needs an even number of orders");
    }
    let p: Vec<(usize, usize)> = o.chunks(2).map(|w| (w[0], w[1])).collect();
    if let Some((a, b)) = p.iter().find(|(a, b)| *b != a + 1) {
        return config(format!("pair ({a}, {b}) is not of the form (n, n+1)"));
    }
    Ok(p)
}

/// Replaces every random seed, numbering the random components in order.
fn reseed(spec: SchurSpec, seed: Option<u64>) -> SchurSpec {
    fn go(spec: SchurSpec, next: &mut u64) -> SchurSpec {
        let mut take = || {
            let s = *next;
            *next = next.wrapping_add(1);
            s
        };
        match spec {
            SchurSpec::RandomHalfPlane { u, cos_alpha0, .. } => SchurSpec::RandomHalfPlane { u, cos_alpha0, seed: take() },
            SchurSpec::RandomArc { center, half_width, .. } => SchurSpec::RandomArc { center, half_width, seed: take() },
            SchurSpec::RandomSet { values, .. } => SchurSpec::RandomSet { values, seed: take() },
            SchurSpec::Rotated { lambda, inner } => SchurSpec::Rotated { lambda, inner: Box::new(go(*inner, next)) },
            SchurSpec::Parity { odd, even } => {
                let odd = Box::new(go(*odd, next));
                SchurSpec::Parity { odd, even: Box::new(go(*even, next)) }
            }
            SchurSpec::Tail { inner, offset, scale } => SchurSpec::Tail { inner: Box::new(go(*inner, next)), offset, scale },
            other => other,
        }
    }
    match seed {
        Some(s) => {
            let mut next = s;
            go(spec, &mut next)
        }
        None => spec,
    }
}

fn unit(text: &str) -> Result<UnitPoint, CliError> {
    let z = parse_complex(text)?;
    UnitPoint::new(z).map_err(|_| CliError::Config(format!("{text} is not on the unit circle")))
}

fn parse_bound(text: &str, common: &Common) -> Result<BoundPlan, CliError> {
    let f: Vec<&str> = text.trim().split(':').collect();
    let arity = |k: &[usize]| -> Result<(), CliError> {
        if k.contains(&(f.len() - 1)) {
            Ok(())
        } else {
            config(format!("bound {:?} takes {:?} fields, got {}", f[0], k, f.len() - 1))
        }
    };
    Ok(match f[0] {
        "halfplane" => {
            arity(&[2])?;
            BoundPlan::Halfplane(unit(f[1])?, parse_real(f[2])?)
        }
        "band" => {
            arity(&[3])?;
            BoundPlan::Band(unit(f[1])?, parse_real(f[2])?, parse_real(f[3])?)
        }
        "two-limit" => {
            arity(&[3])?;
            BoundPlan::TwoLimit(unit(f[1])?, parse_complex(f[2])?, parse_complex(f[3])?)
        }
        "two-periodic" => {
            arity(&[3, 5])?;
            let (xo, xe) = if f.len() == 6 { (parse_real(f[4])?, parse_real(f[5])?) } else { (0.0, 0.0) };
            BoundPlan::TwoPeriodic(unit(f[1])?, parse_complex(f[2])?, parse_complex(f[3])?, xo, xe)
        }
        "ratio" => {
            arity(&[2])?;
            let pts = f[1].split('|').map(unit).collect::<Result<Vec<_>, _>>()?;
            BoundPlan::Ratio(pts, parse_real(f[2])?)
        }
        "diagonal" => {
            arity(&[1])?;
            BoundPlan::Diagonal(parse_complex(f[1])?)
        }
        "estimate" => {
            arity(&[0])?;
            let n = *orders(common)?.iter().max().expect("nonempty");
            BoundPlan::Estimate(schur(common)?, n)
        }
        other => return config(format!("unknown bound {other:?}")),
    })
}

fn parse_grid(text: &str) -> Result<Vec<Complex64>, CliError> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("ring:") {
        let (radii, count) =
            rest.rsplit_once(':').ok_or_else(|| CliError::Config(format!("ring grid needs RADII:COUNT, got {t:?}")))?;
        let radii = radii.split(',').map(parse_real).collect::<Result<Vec<_>, _>>()?;
        if radii.iter().any(|r| !(*r >= 0.0)) {
            return config("ring radii must be non-negative");
        }
        let count: usize = count.trim().parse().map_err(|_| CliError::Config(format!("bad ring count {count:?}")))?;
        if count == 0 {
            return config("ring count must be positive");
        }
        Ok(ring_grid(&radii, count))
    } else if let Some(rest) = t.strip_prefix("points:") {
        Ok(rest.split('|').map(parse_complex).collect::<Result<Vec<_>, _>>()?)
    } else {
        config(format!("grid must be ring:... or points:..., got {t:?}"))
    }
}

fn compute(plan: &Plan, format: Format) -> Result<String, CliError> {
    match plan {
        Plan::Params { spec, n } => params_output(spec, *n, format),
        Plan::Spectrum { spec, uspec, orders } => {
            let spectra = spectra(spec, uspec, orders)?;
            spectrum_output("spectrum", spec, uspec, orders, &spectra, format, None)
        }
        Plan::Figure { id, caption, spec, uspec, orders } => {
            let spectra = spectra(spec, uspec, orders)?;
            spectrum_output("figure", spec, uspec, orders, &spectra, format, Some((id, caption)))
        }
        Plan::Support { spec, uspec, pairs, eps } => {
            let est = approximate_support(spec, uspec, pairs, *eps)?;
            support_output(spec, uspec, &est, format)
        }
        Plan::Bounds(b) => {
            let bound = evaluate_bound(b)?;
            bound_output(&bound, format)
        }
        Plan::Cf { spec, uspec, orders, grid, oracle } => {
            let top = *orders.iter().max().expect("nonempty");
            let prefix = expand(spec, top)?;
            let us = gen_u_sequence(uspec, &prefix, top)?;
            let rows = approximant_sweep(&prefix, &us, orders, grid, *oracle)?;
            match format {
                Format::Csv => Ok(sweep_to_csv(&rows)),
                _ => json_string(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "cf",
                    "params": spec.to_string(),
                    "u": uspec.to_string(),
                    "rows": rows,
                })),
            }
        }
        Plan::Quad { spec, uspec, orders } => quad_output(spec, uspec, orders, format),
    }
}

fn spectra(spec: &SchurSpec, uspec: &USequenceSpec, orders: &[usize]) -> Result<Vec<SpectrumResult>, CliError> {
    // Expanding once validates the spec at the largest order before the parallel work.
    let top = *orders.iter().max().expect("nonempty");
    expand(spec, top)?;
    let out: Result<Vec<_>, CmvError> = orders.par_iter().map(|&n| sigma_n(spec, uspec, n)).collect();
    Ok(out?)
}

fn json_string(v: &Value) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    Ok(s)
}

fn params_output(spec: &SchurSpec, n: usize, format: Format) -> Result<String, CliError> {
    let p = expand(spec, n)?;
    match format {
        Format::Csv => {
            let mut s = String::from("n,re,im,rho\n");
            for (k, (a, r)) in p.values.iter().zip(&p.rhos).enumerate() {
                s.push_str(&format!("{},{},{},{}\n", k + 1, g17(a.re), g17(a.im), g17(*r)));
            }
            Ok(s)
        }
        _ => {
            let values: Vec<Value> = p
                .values
                .iter()
                .zip(&p.rhos)
                .enumerate()
                .map(|(k, (a, r))| json!({"n": k + 1, "re": a.re, "im": a.im, "rho": r}))
                .collect();
            json_string(&json!({"schema_version": SCHEMA_VERSION, "command": "params", "params": spec.to_string(), "values": values}))
        }
    }
}

fn spectrum_output(
    command: &str,
    spec: &SchurSpec,
    uspec: &USequenceSpec,
    orders: &[usize],
    spectra: &[SpectrumResult],
    format: Format,
    figure: Option<(&str, &str)>,
) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut s = String::from("n,j,re,im,arg,residual\n");
            for (n, r) in orders.iter().zip(spectra) {
                for (j, (p, res)) in r.spectrum.points().iter().zip(&r.residuals).enumerate() {
                    let z = p.value();
                    s.push_str(&format!("{n},{},{},{},{},{}\n", j + 1, g17(z.re), g17(z.im), g17(p.angle()), g17(*res)));
                }
            }
            Ok(s)
        }
        Format::Json => {
            let items: Vec<Value> = orders
                .iter()
                .zip(spectra)
                .map(|(n, r)| {
                    let points: Vec<Value> = r
                        .spectrum
                        .points()
                        .iter()
                        .zip(&r.residuals)
                        .map(|(p, res)| json!({"re": p.value().re, "im": p.value().im, "arg": p.angle(), "residual": res}))
                        .collect();
                    json!({"n": n, "iterations": r.iterations, "modulus_defect": r.modulus_defect, "points": points})
                })
                .collect();
            let mut v = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "params": spec.to_string(),
                "u": uspec.to_string(),
                "spectra": items,
            });
            if let Some((id, caption)) = figure {
                v["figure"] = json!({"id": id, "caption": caption});
            }
            json_string(&v)
        }
        Format::Svg => {
            let panels: Vec<Panel> = orders
                .iter()
                .zip(spectra)
                .map(|(n, r)| Panel {
                    label: format!("n = {n}"),
                    points: r.spectrum.values().map(|z| (z, Mark::Filled)).collect(),
                    arcs: vec![],
                })
                .collect();
            svg(&panels)
        }
    }
}

fn svg(panels: &[Panel]) -> Result<String, CliError> {
    render(panels).ok_or_else(|| CliError::Numeric(CmvError::Degenerate("nothing to draw".into())))
}

fn support_output(spec: &SchurSpec, uspec: &USequenceSpec, est: &SupportEstimate, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(est.to_csv()),
        Format::Json => json_string(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "support",
            "params": spec.to_string(),
            "u": uspec.to_string(),
            "estimate": est,
        })),
        Format::Svg => {
            let label = est.orders.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("/");
            let points = est
                .candidates
                .iter()
                .map(|c| {
                    let m = if c.class == CandidateClass::Double { Mark::Filled } else { Mark::Hollow };
                    (c.point.value(), m)
                })
                .collect();
            svg(&[Panel { label: format!("n = {label}"), points, arcs: vec![] }])
        }
    }
}

fn evaluate_bound(b: &BoundPlan) -> Result<ArcBound, CliError> {
    Ok(match b {
        BoundPlan::Halfplane(l, a0) => bound_halfplane(*l, *a0)?,
        BoundPlan::Band(l, a1, a2) => bound_band(*l, *a1, *a2)?,
        BoundPlan::TwoLimit(l, a, c) => bound_two_limit_points(*l, *a, *c)?,
        BoundPlan::TwoPeriodic(l, ao, ae, xo, xe) => bound_two_periodic(*l, *ao, *ae, *xo, *xe)?,
        BoundPlan::Ratio(pts, m) => bound_ratio(pts, *m)?,
        BoundPlan::Diagonal(a) => bound_diagonal(&DiagonalLimits::constant(*a)?)?,
        BoundPlan::Estimate(spec, n) => bound_diagonal(&estimate_diagonal_limits(&expand(spec, *n)?)?)?,
    })
}

fn bound_output(bound: &ArcBound, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut s = String::from("center_re,center_im,half_width,closed\n");
            for a in &bound.arcs.arcs {
                s.push_str(&format!("{},{},{},{}\n", g17(a.center.re), g17(a.center.im), g17(a.half_width), a.closed));
            }
            Ok(s)
        }
        Format::Json => json_string(&json!({"schema_version": SCHEMA_VERSION, "command": "bounds", "bound": bound})),
        Format::Svg => {
            let panel = Panel { label: bound.hypothesis.clone(), points: vec![], arcs: bound.arcs.arcs.clone() };
            svg(&[panel])
        }
    }
}

/// Closed-form measure matching a constant parameter spec, if any.
fn oracle_for(spec: &SchurSpec) -> Option<OracleMeasure> {
    match *spec {
        SchurSpec::Constant(a) if a == Complex64::new(0.0, 0.0) => Some(OracleMeasure::Lebesgue),
        SchurSpec::Constant(a) if a.norm() < 1.0 => Some(OracleMeasure::Geronimus { a }),
        _ => None,
    }
}

fn moment_error(rule: &QuadratureRule, moments: &[Complex64]) -> f64 {
    (0..rule.order)
        .map(|k| {
            let pos = (rule.moment(k as i64) - moments[k]).norm();
            let neg = (rule.moment(-(k as i64)) - moments[k].conj()).norm();
            pos.max(neg)
        })
        .fold(0.0, f64::max)
}

fn quad_output(spec: &SchurSpec, uspec: &USequenceSpec, orders: &[usize], format: Format) -> Result<String, CliError> {
    let top = *orders.iter().max().expect("nonempty");
    let prefix = expand(spec, top)?;
    let us = gen_u_sequence(uspec, &prefix, top)?;
    let oracle = oracle_for(spec);
    let rules: Vec<QuadratureRule> = orders
        .par_iter()
        .map(|&n| szego_rule(&prefix, us[n - 1], n))
        .collect::<Result<_, _>>()?;
    let mut errors = Vec::with_capacity(rules.len());
    for r in &rules {
        let err = match oracle {
            Some(m) => Some(moment_error(r, &oracle_moments(m, r.order - 1)?)),
            None => None,
        };
        let defect = (r.weight_sum() - 1.0).abs();
        match err {
            Some(e) => eprintln!("n = {}: max moment error {}, weight-sum defect {}", r.order, g17(e), g17(defect)),
            None => eprintln!("n = {}: weight-sum defect {} (no closed-form moments)", r.order, g17(defect)),
        }
        errors.push((err, defect));
    }
    match format {
        Format::Csv => {
            let mut s = String::from("n,j,re,im,weight\n");
            for r in &rules {
                for (j, (z, w)) in r.nodes.values().zip(&r.weights).enumerate() {
                    s.push_str(&format!("{},{},{},{},{}\n", r.order, j + 1, g17(z.re), g17(z.im), g17(*w)));
                }
            }
            Ok(s)
        }
        _ => {
            let items: Vec<Value> = rules
                .iter()
                .zip(&errors)
                .map(|(r, (e, d))| json!({"rule": r, "max_moment_error": e, "weight_sum_defect": d}))
                .collect();
            json_string(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "quad",
                "params": spec.to_string(),
                "u": uspec.to_string(),
                "rules": items,
            }))
        }
    }
}

fn write_output(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(body.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source });
    };
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(body.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reseed_numbers_components() {
        let spec = SchurSpec::parse("parity:random-halfplane:1:0.5:1;random-arc:0.25:1:2").unwrap();
        let s = reseed(spec, Some(100)).to_string();
        assert!(s.contains(":100") && s.contains(":101"), "{s}");
    }

    #[test]
    fn grid_grammar() {
        assert_eq!(parse_grid("ring:0.5,2:4").unwrap().len(), 8);
        assert_eq!(parse_grid("points:0.5|2i").unwrap(), vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 2.0)]);
        assert!(parse_grid("ring:0.5").is_err());
        assert!(parse_grid("disk:1").is_err());
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(CmvError::Parse("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(CmvError::SingularShift { z: Complex64::new(1.0, 0.0) }).exit_code(), 3);
    }
}
