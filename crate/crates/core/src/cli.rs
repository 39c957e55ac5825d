//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 property violation, 2 usage or configuration
//! error, 3 numerical-tolerance failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::config::{load_model, load_rates, load_state, RatesSpec, ResolvedConfig};
use crate::error::{Error, Result};
use crate::gksl::{GKSLModel, MAX_SUPEROPERATOR_DIM};
use crate::hilbert::{Block, LevelStructure, State};
use crate::invariants::{omega_perp_uniqueness, reconstruct, stratify, Uniqueness};
use crate::operator::Operator;
use crate::suite::{run_suite, SuiteName};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

/// Thermal inverse temperature used when neither `--rates` nor
/// `--thermal-beta` is given.
pub const DEFAULT_BETA: f64 = 1.0;

#[derive(Debug, Parser)]
#[command(name = "qet", about = "N-level quantum energy transport", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Serialize the transport operators, generator ingredients and subspace frames.
    Build(BuildArgs),
    /// Integrate the master equation and write a trajectory CSV.
    Evolve(EvolveArgs),
    /// Report the harmonic subspace, its stratification and invariant-state checks.
    Invariants(ReportArgs),
    /// Run a randomized property suite.
    Check(CheckArgs),
    /// Dump the stationary kernel and the uniqueness check on the
    /// complement of the transport region.
    Stationary(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model JSON: {"dims": [...], optional energies}.
    #[arg(long)]
    pub config: PathBuf,
    /// Rates JSON, explicit per channel or {"thermal_beta": x}.
    #[arg(long, conflicts_with = "thermal_beta")]
    pub rates: Option<PathBuf>,
    /// Thermal rates at this inverse temperature.
    #[arg(long = "thermal-beta", allow_negative_numbers = true)]
    pub thermal_beta: Option<f64>,
    /// Recorded in the output for reproducibility.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial state JSON: density matrix, {"ket": {...}} or {"basis": ...}.
    #[arg(long)]
    pub initial: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Tolerance of the structural checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_parser = parse_suite)]
    pub suite: SuiteName,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Cases per suite; the suite default when omitted.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Optional JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_suite(s: &str) -> std::result::Result<SuiteName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parse arguments, run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Tolerance(_) => EXIT_TOLERANCE,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Build(a) => cmd_build(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Invariants(a) => cmd_invariants(a),
        Command::Check(a) => cmd_check(a),
        Command::Stationary(a) => cmd_stationary(a),
    }
}

struct Loaded {
    model: GKSLModel,
    rates_source: String,
}

fn load(args: &ModelArgs) -> Result<Loaded> {
    let levels = load_model(&args.config)?;
    let (spec, rates_source) = match (&args.rates, args.thermal_beta) {
        (Some(p), _) => (load_rates(p)?, p.display().to_string()),
        (None, Some(beta)) => (RatesSpec::Thermal { beta }, format!("thermal_beta={beta}")),
        (None, None) => (
            RatesSpec::Thermal { beta: DEFAULT_BETA },
            format!("thermal_beta={DEFAULT_BETA} (default)"),
        ),
    };
    let rates = spec.resolve(&levels)?;
    Ok(Loaded {
        model: GKSLModel::new(levels, rates)?,
        rates_source,
    })
}

fn resolved(model: &GKSLModel, initial: Option<&State>, params: serde_json::Value) -> ResolvedConfig {
    ResolvedConfig {
        levels: model.levels().to_config(),
        rates: model.rates().clone(),
        initial: initial.map(|s| s.operator().clone()),
        params,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Frame<'a> {
    label: &'a str,
    dim: usize,
    generators: &'a [String],
    frame: &'a Operator,
}

fn frame(s: &crate::subspace::Subspace) -> Frame<'_> {
    Frame {
        label: &s.label,
        dim: s.dim(),
        generators: &s.labels,
        frame: &s.frame,
    }
}

pub fn cmd_build(args: &BuildArgs) -> Result<i32> {
    let Loaded { model, rates_source } = load(&args.model)?;
    let cfg = resolved(&model, None, json!({"command": "build"}));
    let t = model.transport();
    let kraus: Vec<_> = model
        .kraus()
        .iter()
        .map(|k| json!({"label": k.label(), "op": k.op}))
        .collect();
    let subspaces = if model.levels().n_levels() >= 2 {
        let s = stratify(model.levels())?;
        let levels_v: Vec<_> = s.levels_v.iter().map(frame).collect();
        json!({
            "V": frame(&s.v),
            "V_k": levels_v,
            "W": frame(&s.w),
            "M": frame(&s.m),
            "V_1_minus_W": frame(&s.v1_minus_w),
        })
    } else {
        serde_json::Value::Null
    };
    let out = json!({
        "config_digest": cfg.digest(),
        "seed": args.model.seed,
        "rates_source": rates_source,
        "levels": cfg.levels,
        "rates": cfg.rates,
        "total_dim": model.dim(),
        "Z": t.z,
        "abs_Z": t.abs,
        "abs_Z_perp": t.abs_perp,
        "H": model.hamiltonian(),
        "H_eff": model.effective_hamiltonian(),
        "kraus": kraus,
        "subspaces": subspaces,
    });
    write_json(&args.out, &out)?;
    println!("wrote {}", args.out.display());
    Ok(EXIT_PASS)
}

/// One row of the trajectory CSV.
pub fn trajectory_row(levels: &LevelStructure, t: f64, rho: &State) -> Result<Vec<f64>> {
    let op = rho.operator();
    let mut row = vec![t];
    for b in levels.blocks() {
        row.push((&levels.projector(b)? * op).trace().re);
    }
    row.push(op.trace().re);
    row.push(rho.min_eigenvalue()?);
    Ok(row)
}

pub fn trajectory_header(levels: &LevelStructure) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for b in levels.blocks() {
        h.push(match b {
            Block::Minus => "tr_Pminus".to_string(),
            Block::Plus => "tr_Pplus".to_string(),
            Block::Level(k) => format!("tr_P{k}"),
        });
    }
    h.push("trace".into());
    h.push("min_eig".into());
    h
}

pub fn cmd_evolve(args: &EvolveArgs) -> Result<i32> {
    if args.steps == 0 {
        return Err(Error::InvalidInput("--steps must be positive".into()));
    }
    if !(args.t.is_finite() && args.t >= 0.0) {
        return Err(Error::InvalidInput(format!("--t must be a nonnegative number, got {}", args.t)));
    }
    let Loaded { model, .. } = load(&args.model)?;
    let rho0 = load_state(&args.initial, model.levels())?;
    let cfg = resolved(
        &model,
        Some(&rho0),
        json!({"command": "evolve", "t": args.t, "steps": args.steps}),
    );
    let trajectory = model.evolve(&rho0, args.t, args.steps)?;
    let dt = args.t / args.steps as f64;
    let file = std::fs::File::create(&args.out)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", args.out.display())))?;
    let mut file = std::io::BufWriter::new(file);
    writeln!(file, "# config_sha256={} seed={}", cfg.digest(), args.model.seed)
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut w = csv::Writer::from_writer(file);
    let io = |e: csv::Error| Error::Config(format!("cannot write {}: {e}", args.out.display()));
    w.write_record(trajectory_header(model.levels())).map_err(io)?;
    for (j, rho) in trajectory.iter().enumerate() {
        let row = trajectory_row(model.levels(), j as f64 * dt, rho)?;
        w.write_record(row.iter().map(|x| x.to_string())).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(e.to_string()))?;
    println!("wrote {} rows to {}", trajectory.len(), args.out.display());
    Ok(EXIT_PASS)
}

pub fn cmd_invariants(args: &ReportArgs) -> Result<i32> {
    let Loaded { model, rates_source } = load(&args.model)?;
    let levels = model.levels();
    let cfg = resolved(&model, None, json!({"command": "invariants", "tol": args.tol}));
    let s = stratify(levels)?;
    let pv = s.v.projector();
    let pvp = &Operator::identity(model.dim()) - &pv;
    let harmonic_v = model.dual_generator(&pv)?.norm_max();
    let harmonic_vp = model.dual_generator(&pvp)?.norm_max();
    let (kernel_dim, reconstruction) = if model.dim() <= MAX_SUPEROPERATOR_DIM {
        let k = model.stationary_kernel()?.dim();
        let rec: Vec<f64> = if s.v_minus_w.is_zero() {
            Vec::new()
        } else {
            model
                .stationary_kernel_on(&s.v_minus_w)?
                .iter()
                .map(|x| reconstruct(&model, x).max_abs_diff(x) / x.norm_max())
                .collect()
        };
        (Some(k), rec)
    } else {
        (None, Vec::new())
    };
    let mu: Vec<[f64; 2]> = s.mu.iter().map(|z| [z.re, z.im]).collect();
    let mut violations: Vec<String> = s.checks.iter().filter(|c| c.residual > args.tol).map(|c| c.name.clone()).collect();
    if harmonic_v > args.tol {
        violations.push("L*(P_V) = 0".into());
    }
    if harmonic_vp > args.tol {
        violations.push("L*(P_V-perp) = 0".into());
    }
    if reconstruction.iter().any(|&r| r > args.tol) {
        violations.push("kernel on V-W reconstructs from level 1".into());
    }
    let out = json!({
        "config_digest": cfg.digest(),
        "seed": args.model.seed,
        "rates_source": rates_source,
        "tol": args.tol,
        "dims": {
            "V": s.v.dim(),
            "V_k": s.levels_v.iter().map(|x| x.dim()).collect::<Vec<_>>(),
            "W": s.w.dim(),
            "M": s.m.dim(),
            "V_1_minus_W": s.v1_minus_w.dim(),
            "V_minus_W": s.v_minus_w.dim(),
        },
        "mu": mu,
        "m_source": s.m_source,
        "checks": s.checks,
        "incompatible_levels": s.incompatible_levels,
        "skipped_generators": s.skipped_generators,
        "harmonic_residuals": {"P_V": harmonic_v, "P_V_perp": harmonic_vp},
        "stationary_kernel_dim": kernel_dim,
        "reconstruction_residuals": reconstruction,
        "violations": violations,
    });
    write_json(&args.out, &out)?;
    for v in &violations {
        println!("violation: {v}");
    }
    println!("wrote {}", args.out.display());
    Ok(if violations.is_empty() { EXIT_PASS } else { EXIT_VIOLATION })
}

pub fn cmd_stationary(args: &ReportArgs) -> Result<i32> {
    let Loaded { model, rates_source } = load(&args.model)?;
    let cfg = resolved(&model, None, json!({"command": "stationary", "tol": args.tol}));
    let kernel = model.stationary_kernel()?;
    let d = model.dim();
    let basis: Vec<Operator> = kernel
        .vectors()
        .iter()
        .map(|v| Operator::unvectorize(v, d))
        .collect::<Result<_>>()?;
    let pm = model.levels().projector(Block::Minus)?;
    let ground_distance = model.kernel_distance(&kernel, &pm);
    let uniq = omega_perp_uniqueness(&model)?;
    let out = json!({
        "config_digest": cfg.digest(),
        "seed": args.model.seed,
        "rates_source": rates_source,
        "tol": args.tol,
        "kernel_dim": kernel.dim(),
        "kernel_basis": basis,
        "ground_state_distance": ground_distance,
        "omega_perp": uniq,
    });
    write_json(&args.out, &out)?;
    println!("kernel dimension {}, omega-perp {:?}", kernel.dim(), uniq.status);
    println!("wrote {}", args.out.display());
    let ok = ground_distance <= args.tol && uniq.status != Uniqueness::NotUnique;
    Ok(if ok { EXIT_PASS } else { EXIT_VIOLATION })
}

pub fn cmd_check(args: &CheckArgs) -> Result<i32> {
    let report = run_suite(args.suite, args.seed, args.cases)?;
    for line in report.lines() {
        println!("{line}");
    }
    let failed = report.properties.iter().filter(|p| !p.passed).count();
    println!(
        "{}: {} properties, {} failed (suite {}, seed {})",
        if report.passed { "PASS" } else { "FAIL" },
        report.properties.len(),
        failed,
        report.suite,
        report.seed
    );
    if let Some(path) = &args.out {
        let digest = crate::config::sha256_hex(
            serde_json::to_string(&json!({"suite": args.suite, "seed": args.seed, "cases": args.cases}))
                .expect("serializable")
                .as_bytes(),
        );
        write_json(path, &json!({"config_digest": digest, "seed": args.seed, "report": report}))?;
    }
    Ok(if report.passed { EXIT_PASS } else { EXIT_VIOLATION })
}
