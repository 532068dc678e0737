//! Subcommand definitions and their handlers.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ismquant::antichain::{build_lambda, lemma_suite, CheckStatus, DEFAULT_WORD_BUDGET};
use ismquant::dimension::{classify_regime, scenario_build};
use ismquant::ifs::CondensationSystem;
use ismquant::measure::{discretize_mu, discretize_nu, sample_mu, DEFAULT_ATOM_BUDGET};
use ismquant::quantizer::{
    check_condensation_inequality, choose_depth, coefficient_sequence, error_curve_on, estimate_dimension, ErrorCurve,
    LloydOptions,
};
use ismquant::reproduce::{render_report, run_criterion, AcceptanceTolerances, CRITERIA, DEFAULT_SEED};
use ismquant::table::{fmt_f64, fmt_opt, Table};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{sha256_hex, Sink, Status};

#[derive(Debug, Parser)]
#[command(name = "ismquant", version, about = "Quantization of in-homogeneous self-similar measures")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Directory for output files; results go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for every random choice, recorded in each output header.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SystemArg {
    /// System definition (JSON).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    system: SystemArg,
    #[arg(long, value_parser = parse_r)]
    r: f64,
    /// Comma-separated values or inclusive ranges, e.g. `1,2,4` or `8..128`.
    #[arg(long, value_parser = parse_n_list)]
    n_list: NList,
    /// Discretisation depth; chosen from the smallest error when omitted.
    #[arg(long, value_parser = parse_depth)]
    depth: Option<usize>,
    /// Lloyd restarts (used when the system is not on the line).
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

#[derive(Clone, Debug)]
struct NList(Vec<usize>);

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Source {
    Mu,
    Nu,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve both moment equations and classify the regime.
    Dims {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, value_parser = parse_r)]
        r: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Build the three systems around the regime boundary for equal ratios.
    Scenario {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        c: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, value_parser = parse_r)]
        r: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Build the threshold antichain at level k.
    Antichain {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, value_parser = parse_r)]
        r: f64,
        #[arg(long, value_parser = parse_k)]
        k: u64,
        #[arg(long, default_value_t = DEFAULT_WORD_BUDGET)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the antichain checks; exits 3 on any failure.
    Verify {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, value_parser = parse_r)]
        r: f64,
        #[arg(long, value_parser = parse_k)]
        k: u64,
        /// Exponents to test; defaults to 0.5ξ, ξ₁, ξ₂, ξ, 1.5ξ.
        #[arg(long, value_delimiter = ',')]
        s_grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_WORD_BUDGET)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted atoms of the depth-L discretisation.
    Measure {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, value_parser = parse_depth)]
        depth: usize,
        #[arg(long, value_enum, default_value = "mu")]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_ATOM_BUDGET)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded samples from μ.
    Sample {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        count: usize,
        #[arg(long, value_parser = parse_depth, default_value_t = 40)]
        depth_cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// n-th quantization errors of μ.
    Quantize {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Regression slope of log n against −log e.
    DimEstimate {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        common: Common,
    },
    /// The sequence n^{1/ξ} e_n.
    Coeff {
        #[command(flatten)]
        curve: CurveArgs,
        /// Exponent; defaults to ξ = max(ξ₁, ξ₂).
        #[arg(long)]
        xi: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Both sides of the condensation recursion for the quantization error.
    CondensationCheck {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, value_parser = parse_r)]
        r: f64,
        #[arg(long, value_parser = parse_n_list)]
        n_list: NList,
        #[arg(long, value_parser = parse_depth, default_value_t = 12)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run every acceptance criterion and write a report; exits 3 on any failure.
    Reproduce {
        /// JSON file overriding any of the acceptance tolerances.
        #[arg(long)]
        tolerances: Option<PathBuf>,
        #[arg(long, required = true)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn parse_r(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(r) if r > 0.0 && r.is_finite() => Ok(r),
        Ok(_) => Err("r must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_k(s: &str) -> std::result::Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("k must be at least 1".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_depth(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("depth must be at least 1".into()),
        Ok(d) => Ok(d),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_n_list(s: &str) -> std::result::Result<NList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|e| format!("{part}: {e}"))?;
            let b: usize = b.trim().parse().map_err(|e| format!("{part}: {e}"))?;
            if a > b {
                return Err(format!("empty range {part}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|e| format!("{part}: {e}"))?);
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err("n values must be positive and the list nonempty".into());
    }
    out.sort_unstable();
    out.dedup();
    Ok(NList(out))
}

/// The system and the hash of its configuration file.
fn load_system(path: &Path) -> Result<(CondensationSystem, String)> {
    // read failures are bad input, so they are reported without the io error
    let bytes = fs::read(path).map_err(|e| anyhow!("cannot read config {}: {e}", path.display()))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| anyhow!("config {} is not utf-8: {e}", path.display()))?;
    let system = CondensationSystem::from_json(text).map_err(|e| anyhow!("config {}: {e}", path.display()))?;
    Ok((system, sha256_hex(&bytes)))
}

fn hash_args<T: Serialize>(args: &T) -> Result<String> {
    Ok(sha256_hex(serde_json::to_string(args)?.as_bytes()))
}

fn frame_meta(system: &CondensationSystem) -> (&'static str, String) {
    ("frame_scale", fmt_f64(system.normalization().scale))
}

pub fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Dims { system, r, common } => dims(&system.config, r, common),
        Command::Scenario { n, c, t, r, common } => scenario(n, c, t, r, common),
        Command::Antichain { system, r, k, budget, common } => antichain(&system.config, r, k, budget, common),
        Command::Verify { system, r, k, s_grid, budget, common } => {
            verify(&system.config, r, k, s_grid, budget, common)
        }
        Command::Measure { system, depth, source, budget, common } => {
            measure(&system.config, depth, source, budget, common)
        }
        Command::Sample { system, count, depth_cap, common } => sample(&system.config, count, depth_cap, common),
        Command::Quantize { curve, common } => quantize(curve, common),
        Command::DimEstimate { curve, common } => dim_estimate(curve, common),
        Command::Coeff { curve, xi, common } => coeff(curve, xi, common),
        Command::CondensationCheck { system, r, n_list, depth, common } => {
            condensation_check(&system.config, r, &n_list.0, depth, common)
        }
        Command::Reproduce { tolerances, out, seed } => reproduce(tolerances.as_deref(), out, seed),
    }
}

fn dims(config: &Path, r: f64, common: Common) -> Result<Status> {
    let (system, hash) = load_system(config)?;
    let report = classify_regime(&system, r)?;
    let sink = Sink::new(common.out, hash, common.seed)?;
    sink.json("dims.json", serde_json::to_value(&report)?, &[("osc", serde_json::to_value(system.osc())?)])?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct ScenarioArgs<'a> {
    n: usize,
    c: f64,
    t: &'a [f64],
    r: f64,
}

fn scenario(n: usize, c: f64, t: Vec<f64>, r: f64, common: Common) -> Result<Status> {
    let Some(out) = common.out else {
        bail!("scenario writes several files and needs --out");
    };
    let hash = hash_args(&ScenarioArgs { n, c, t: &t, r })?;
    let sc = scenario_build(n, c, &t, r)?;
    let sink = Sink::new(Some(out), hash, common.seed)?;
    let mut record = json!({ "r": sc.r, "xi1": sc.xi1, "p0_threshold": sc.p0_threshold });
    for (label, system) in sc.systems() {
        let dims = classify_regime(system, r)?;
        record[label] = json!({
            "file": format!("{label}.json"),
            "p0": system.p0(),
            "xi1": dims.xi1,
            "xi2": dims.xi2,
            "regime": dims.regime.as_str(),
        });
        sink.json(&format!("{label}.json"), serde_json::to_value(system.to_config())?, &[])?;
    }
    sink.json("scenario.json", record, &[])?;
    Ok(Status::Ok)
}

fn antichain(config: &Path, r: f64, k: u64, budget: usize, common: Common) -> Result<Status> {
    let (system, hash) = load_system(config)?;
    system.require_osc()?;
    let lam = build_lambda(&system, r, k, budget)?;
    let sink = Sink::new(common.out, hash, common.seed)?;
    let mut table = Table::new(&["word", "depth", "h1", "h2", "h"]);
    for w in &lam.words {
        table.push(vec![w.word.to_string(), w.depth().to_string(), fmt_f64(w.h1), fmt_f64(w.h2), fmt_f64(w.h())]);
    }
    let header = [("k", k.to_string()), ("r", fmt_f64(r))];
    sink.table("antichain.csv", &table, &header)?;
    let summary = json!({
        "k": k,
        "r": r,
        "N_kr": lam.cardinality(),
        "l1k": lam.l1k,
        "l2k": lam.l2k,
        "eta_lower": lam.eta_lower,
        "eta_upper": lam.eta_upper,
        "threshold": lam.threshold,
        "h_total": lam.h_total(),
    });
    sink.json("antichain.json", summary, &[])?;
    Ok(Status::Ok)
}

fn verify(config: &Path, r: f64, k: u64, s_grid: Option<Vec<f64>>, budget: usize, common: Common) -> Result<Status> {
    let (system, hash) = load_system(config)?;
    system.require_osc()?;
    let grid = match s_grid {
        Some(grid) => {
            if grid.is_empty() || grid.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                bail!("s-grid values must be positive");
            }
            grid
        }
        None => {
            let d = classify_regime(&system, r)?;
            vec![0.5 * d.xi, d.xi1, d.xi2, d.xi, 1.5 * d.xi]
        }
    };
    let report = lemma_suite(&system, r, k, &grid, budget)?;
    let sink = Sink::new(common.out, hash, common.seed)?;
    let mut table = Table::new(&["check", "s", "level", "value", "bound", "slack", "status", "note"]);
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        };
        table.push(vec![
            c.name.into(),
            fmt_opt(c.s),
            c.level.map(|l| l.to_string()).unwrap_or_default(),
            fmt_f64(c.value),
            fmt_f64(c.bound),
            fmt_f64(c.slack),
            status.into(),
            c.note.clone().unwrap_or_default(),
        ]);
    }
    let header = [("k", k.to_string()), ("r", fmt_f64(r)), ("N_kr", report.n_kr.to_string())];
    sink.table("verify.csv", &table, &header)?;
    let failures: Vec<&str> = report.failures().map(|c| c.name).collect();
    eprintln!(
        "verify: {} passed, {} failed, {} skipped",
        report.count(CheckStatus::Pass),
        failures.len(),
        report.count(CheckStatus::Skipped)
    );
    if !failures.is_empty() {
        eprintln!("failing checks: {}", failures.join(", "));
    }
    Ok(Status::from_passed(report.passed()))
}

fn coordinate_columns(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["x".into()]
    } else {
        (1..=dim).map(|d| format!("x{d}")).collect()
    }
}

fn measure(config: &Path, depth: usize, source: Source, budget: usize, common: Common) -> Result<Status> {
    let (system, hash) = load_system(config)?;
    let atoms = match source {
        Source::Mu => discretize_mu(&system, depth, budget)?,
        Source::Nu => discretize_nu(&system, depth, budget)?,
    };
    let norm = system.normalization();
    let mut columns = coordinate_columns(system.dim());
    columns.push("weight".into());
    let mut table = Table { columns, rows: Vec::with_capacity(atoms.len()) };
    for j in 0..atoms.len() {
        let mut row: Vec<String> = norm.to_original(atoms.point(j)).into_iter().map(fmt_f64).collect();
        row.push(fmt_f64(atoms.weights()[j]));
        table.push(row);
    }
    let sink = Sink::new(common.out, hash, common.seed)?;
    let header = [
        ("source", format!("{source:?}").to_lowercase()),
        ("depth", depth.to_string()),
        ("resolution", fmt_f64(atoms.resolution * norm.scale)),
    ];
    sink.table("atoms.csv", &table, &header)?;
    Ok(Status::Ok)
}

fn sample(config: &Path, count: usize, depth_cap: usize, common: Common) -> Result<Status> {
    let (system, hash) = load_system(config)?;
    if count == 0 {
        bail!("count must be at least 1");
    }
    let set = sample_mu(&system, common.seed, count, depth_cap)?;
    let norm = system.normalization();
    let mut table = Table { columns: coordinate_columns(system.dim()), rows: Vec::with_capacity(count) };
    for j in 0..set.len() {
        table.push(norm.to_original(set.point(j)).into_iter().map(fmt_f64).collect());
    }
    let sink = Sink::new(common.out, hash, common.seed)?;
    let header = [
        ("depth_cap", depth_cap.to_string()),
        ("truncation_bound", fmt_f64(set.truncation_bound * norm.scale)),
        ("truncated", set.truncated.to_string()),
    ];
    sink.table("samples.csv", &table, &header)?;
    Ok(Status::Ok)
}

/// Smallest depth with at least four atoms per requested point.
fn starting_depth(system: &CondensationSystem, n_max: usize) -> usize {
    let n = system.n_maps() as f64;
    ((4.0 * n_max as f64).ln() / n.ln()).ceil().max(1.0) as usize
}

/// Computes the curve, and when no depth is given deepens the discretisation
/// until `s_max^L ≤ 0.05 · min e` or the atom budget stops it.
fn computed_curve(system: &CondensationSystem, args: &CurveArgs, seed: u64) -> Result<(ErrorCurve, usize)> {
    if args.restarts == 0 {
        bail!("restarts must be at least 1");
    }
    let options = LloydOptions { restarts: args.restarts, seed, ..Default::default() };
    let ns = &args.n_list.0;
    let max_depth = ((DEFAULT_ATOM_BUDGET as f64).ln() / (system.n_maps() as f64).ln()).floor() as usize;
    let mut depth = match args.depth {
        Some(d) => d,
        None => starting_depth(system, *ns.last().expect("nonempty")).min(max_depth),
    };
    loop {
        let atoms = discretize_mu(system, depth, DEFAULT_ATOM_BUDGET)?;
        let curve = error_curve_on(&atoms, args.r, ns, &options)?;
        let e_min = curve.entries.iter().map(|e| e.e).filter(|e| *e > 0.0).fold(f64::INFINITY, f64::min);
        if args.depth.is_some() || !e_min.is_finite() {
            return Ok((curve, depth));
        }
        let wanted = choose_depth(system, e_min)?;
        if wanted <= depth {
            eprintln!("depth {depth}: s_max^L = {:.3e} <= 0.05 * min e = {:.3e}", curve.resolution_bound, 0.05 * e_min);
            return Ok((curve, depth));
        }
        if depth >= max_depth {
            eprintln!(
                "warning: depth {depth} is the atom budget limit; s_max^L = {:.3e} exceeds 0.05 * min e = {:.3e}",
                curve.resolution_bound,
                0.05 * e_min
            );
            return Ok((curve, depth));
        }
        depth = wanted.min(max_depth);
    }
}

/// The curve in the frame of the configuration file.
fn input_frame(system: &CondensationSystem, mut curve: ErrorCurve) -> ErrorCurve {
    let scale = system.normalization().scale;
    for entry in &mut curve.entries {
        entry.e *= scale;
    }
    curve.resolution_bound *= scale;
    curve
}

fn curve_header(curve: &ErrorCurve, depth: usize, system: &CondensationSystem) -> Vec<(&'static str, String)> {
    vec![
        ("r", fmt_f64(curve.r)),
        ("depth", depth.to_string()),
        ("resolution", fmt_f64(curve.resolution_bound)),
        frame_meta(system),
    ]
}

fn quantize(args: CurveArgs, common: Common) -> Result<Status> {
    let (system, hash) = load_system(&args.system.config)?;
    let (curve, depth) = computed_curve(&system, &args, common.seed)?;
    let curve = input_frame(&system, curve);
    let mut table = Table::new(&["n", "e", "method"]);
    for e in &curve.entries {
        table.push(vec![e.n.to_string(), fmt_f64(e.e), e.method.as_str().into()]);
    }
    let sink = Sink::new(common.out, hash, common.seed)?;
    sink.table("curve.csv", &table, &curve_header(&curve, depth, &system))?;
    Ok(Status::Ok)
}

fn dim_estimate(args: CurveArgs, common: Common) -> Result<Status> {
    let (system, hash) = load_system(&args.system.config)?;
    let dims = classify_regime(&system, args.r)?;
    let (curve, depth) = computed_curve(&system, &args, common.seed)?;
    let curve = input_frame(&system, curve);
    let est = estimate_dimension(&curve)?;
    let body = json!({
        "slope": est.slope,
        "intercept": est.intercept,
        "local_slopes": est.local_slopes,
        "used": est.used,
        "xi_theoretical": dims.xi,
        "k_r": dims.k_r,
        "regime": dims.regime.as_str(),
    });
    let sink = Sink::new(common.out, hash, common.seed)?;
    let extra: Vec<(&str, Value)> = vec![
        ("r", json!(args.r)),
        ("depth", json!(depth)),
        ("resolution", json!(curve.resolution_bound)),
        ("frame_scale", json!(system.normalization().scale)),
    ];
    sink.json("dim_estimate.json", body, &extra)?;
    Ok(Status::Ok)
}

fn coeff(args: CurveArgs, xi: Option<f64>, common: Common) -> Result<Status> {
    let (system, hash) = load_system(&args.system.config)?;
    let xi = match xi {
        Some(xi) if xi > 0.0 && xi.is_finite() => xi,
        Some(_) => bail!("xi must be positive"),
        None => classify_regime(&system, args.r)?.xi,
    };
    let (curve, depth) = computed_curve(&system, &args, common.seed)?;
    let curve = input_frame(&system, curve);
    let seq = coefficient_sequence(&curve, xi)?;
    let mut table = Table::new(&["n", "coefficient"]);
    for &(n, v) in &seq.values {
        table.push(vec![n.to_string(), fmt_f64(v)]);
    }
    let mut header = curve_header(&curve, depth, &system);
    header.push(("xi", fmt_f64(xi)));
    let sink = Sink::new(common.out, hash, common.seed)?;
    sink.table("coeff.csv", &table, &header)?;
    eprintln!(
        "max/min {:.4}, first-quarter mean {:.6e}, last-quarter mean {:.6e}",
        seq.ratio, seq.first_quarter_mean, seq.last_quarter_mean
    );
    Ok(Status::Ok)
}

fn condensation_check(config: &Path, r: f64, ns: &[usize], depth: usize, common: Common) -> Result<Status> {
    let (system, hash) = load_system(config)?;
    let report = check_condensation_inequality(&system, r, ns, depth)?;
    let mut table = Table::new(&[
        "n",
        "e_mu",
        "e_nu",
        "n_split",
        "lower_rhs",
        "upper_rhs",
        "slack",
        "lower_ok",
        "upper_ok",
        "vacuous",
    ]);
    for row in &report.rows {
        table.push(vec![
            row.n.to_string(),
            fmt_f64(row.e_mu),
            fmt_f64(row.e_nu),
            row.n_split.to_string(),
            fmt_f64(row.lower_rhs),
            fmt_opt(row.upper_rhs),
            fmt_f64(row.slack),
            row.lower_ok.to_string(),
            row.upper_ok.map(|b| b.to_string()).unwrap_or_default(),
            row.vacuous.to_string(),
        ]);
    }
    let sink = Sink::new(common.out, hash, common.seed)?;
    let header = [
        ("r", fmt_f64(r)),
        ("depth", depth.to_string()),
        ("resolution", fmt_f64(report.resolution)),
        ("low_resolution", report.low_resolution.to_string()),
        frame_meta(&system),
    ];
    sink.table("condensation.csv", &table, &header)?;
    if report.low_resolution {
        eprintln!("warning: the slack exceeds every e^r, so the check is vacuous at depth {depth}");
    }
    Ok(Status::from_passed(report.passed()))
}

fn reproduce(tolerances: Option<&Path>, out: PathBuf, seed: u64) -> Result<Status> {
    let tol: AcceptanceTolerances = match tolerances {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| anyhow!("cannot read tolerances {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| anyhow!("tolerances {}: {e}", path.display()))?
        }
        None => AcceptanceTolerances::default(),
    };
    let hash = hash_args(&tol)?;
    let sink = Sink::new(Some(out), hash, seed)?;
    let mut outcomes = Vec::with_capacity(CRITERIA.len());
    for (id, _, _) in CRITERIA {
        let start = Instant::now();
        let outcome = run_criterion(id, &tol, seed)?;
        let secs = start.elapsed().as_secs_f64();
        eprintln!(
            "{} criterion {id}: {} ({secs:.2}s, limit {:.0}s)",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.summary,
            outcome.runtime_limit
        );
        for a in &outcome.artifacts {
            sink.table(&a.file, &a.table, &[("criterion", id.to_string())])?;
        }
        outcomes.push(outcome);
    }
    sink.text("report.md", &render_report(&outcomes, seed))?;
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| format!("{} ({})", o.id, o.name)).collect();
    if failed.is_empty() {
        Ok(Status::Ok)
    } else {
        eprintln!("failed criteria: {}", failed.join(", "));
        Ok(Status::CheckFailed)
    }
}
