//! Command-line front end: matrix documents and weight-rule specs in,
//! JSON reports and plot-ready CSV tables out.
//!
//! Exit codes: 0 success; 1 usage error; 2 input/parse error; 3 numerical
//! failure; 4 verification violations. Every error goes to standard error
//! with the machine-parsable prefix `E<code>:`.
//!
//! Output conventions: tabular results (iterate traces, numerical-range
//! boundaries, shift weight tables) honor the configured format, CSV by
//! default with 17 significant digits; object-shaped results (polar
//! factors, transforms, reports) are always JSON.

mod config;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{OutputFormat, RunConfig};
use meanform::classes::{classify, kernel_inclusion_check, DEFAULT_CLASS_TOL};
use meanform::numrange::{numerical_range_boundary, DEFAULT_RANGE_POINTS};
use meanform::polar::{DEFAULT_N_MAX, DEFAULT_STOP_TOL};
use meanform::weights::{default_n_schedule, DEFAULT_RADIUS_I_MAX, DEFAULT_RADIUS_N_MAX};
use meanform::{
    aluthge_transform, canonical_polar, exp_log_bridge, mean_iterates, mean_limit_estimate,
    mean_transform, parse_weight_spec, run_suite, shift_aluthge_weights,
    shift_mean_iterate_weights, shift_mean_limit, shift_mean_weights, shift_spectral_radius,
    CMatrix, Laterality, MatrixDocument, SuiteId, WeightError, WeightSequence,
};
use serde_json::{json, Value};
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Row cap for shift weight tables (plot data, not bulk export).
const MAX_TABLE_ROWS: i64 = 4096;

#[derive(Parser)]
#[command(
    name = "meanform",
    version,
    about = "Mean-transform laboratory: polar factors, transform iterates, \
             numerical ranges, weighted-shift calculus, verification suites"
)]
struct Cli {
    /// Optional JSON run configuration; flags override config values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TransformKind {
    /// Mean transform (V|T| + |T|V) / 2.
    Mean,
    /// Lambda-Aluthge transform |T|^l V |T|^(1-l).
    Aluthge,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical polar decomposition T = V|T| of a matrix document.
    Polar {
        /// Matrix document: JSON {"rows", "cols", "data"} of [re, im] pairs.
        file: PathBuf,
    },
    /// Mean or lambda-Aluthge transform of a matrix document.
    Transform {
        #[arg(long, value_enum, default_value_t = TransformKind::Mean)]
        kind: TransformKind,
        /// Aluthge exponent in [0, 1]; only with --kind aluthge (default 0.5).
        #[arg(long)]
        lambda: Option<f64>,
        file: PathBuf,
    },
    /// Iterate the mean transform; one table row per step.
    Iterate {
        /// Maximum number of steps (default: config n_max, else 100).
        #[arg(long)]
        n: Option<usize>,
        /// Stop when consecutive norms or iterates differ by less.
        #[arg(long)]
        tol: Option<f64>,
        file: PathBuf,
    },
    /// Estimate the limit of the iterate norms.
    Meanlimit { file: PathBuf },
    /// Sample the numerical range boundary.
    Numrange {
        /// Number of angular samples (default: config range_points, else 360).
        #[arg(long)]
        points: Option<usize>,
        file: PathBuf,
    },
    /// Operator class predicates and the kernel-inclusion report.
    Classify { file: PathBuf },
    /// Weighted-shift calculus on a symbolic weight rule.
    Shift {
        #[command(subcommand)]
        command: ShiftCommand,
    },
    /// Run randomized verification suites and emit their JSON reports.
    Verify {
        /// Suite id, or "all" for every claim suite (the deliberately
        /// failing self-test runs only when named explicitly).
        #[arg(long, default_value = "all")]
        suite: String,
        /// Trials per suite (default 100).
        #[arg(long)]
        trials: Option<u64>,
        /// Base seed (default: config seed, else 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Inclusive matrix dimension range "a..b".
        #[arg(long, default_value = "2..6")]
        dims: String,
    },
}

/// Weight rule shared by every shift subcommand:
/// `list:1,2,3[;tail=last|;tail=limit=<v>]`, `periodic:3,1`, or
/// `expr:<formula in i>`, each optionally prefixed `bilateral:`.
#[derive(Args)]
struct ShiftArgs {
    #[arg(long, value_name = "SPEC")]
    weights: String,
}

#[derive(Subcommand)]
enum ShiftCommand {
    /// Mean and Aluthge weight maps of the shift.
    Transform(ShiftArgs),
    /// Weights of the n-th mean iterate; one table row per index.
    Iterate {
        #[command(flatten)]
        args: ShiftArgs,
        /// Iterate order.
        #[arg(long)]
        n: usize,
    },
    /// Spectral radius of the shift, with estimator checkpoints.
    Specradius(ShiftArgs),
    /// Mean limit of the shift, with the scheduled sup trace.
    Meanlimit(ShiftArgs),
    /// Mean limit against the exponentiated-shift log-radius.
    Bridge(ShiftArgs),
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
    Numerical(String),
    Violations { failed: usize, total: usize },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Violations { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Input(msg) | CliError::Numerical(msg) => {
                write!(f, "{msg}")
            }
            CliError::Violations { failed, total } => {
                write!(f, "{failed} of {total} verification suites reported violations")
            }
        }
    }
}

/// Weight errors raised while computing (not parsing): a bilateral rule
/// fed to a one-sided estimator is bad input; the rest are numerical.
fn weight_compute_error(e: WeightError) -> CliError {
    match e {
        WeightError::NotUnilateral => CliError::Input(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("E1: {e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("E{}: {}", err.code(), err);
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(CliError::Input)?,
        None => RunConfig::default(),
    };
    if let Some(threads) = config.resolve_threads().map_err(CliError::Input)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    }
    let format = config.format.unwrap_or_default();

    match cli.command {
        Command::Polar { file } => cmd_polar(&file),
        Command::Transform { kind, lambda, file } => cmd_transform(kind, lambda, &file),
        Command::Iterate { n, tol, file } => cmd_iterate(&config, format, n, tol, &file),
        Command::Meanlimit { file } => cmd_meanlimit(&config, &file),
        Command::Numrange { points, file } => cmd_numrange(&config, format, points, &file),
        Command::Classify { file } => cmd_classify(&config, &file),
        Command::Shift { command } => match command {
            ShiftCommand::Transform(args) => cmd_shift_transform(&args.weights),
            ShiftCommand::Iterate { args, n } => cmd_shift_iterate(format, &args.weights, n),
            ShiftCommand::Specradius(args) => cmd_shift_specradius(&config, &args.weights),
            ShiftCommand::Meanlimit(args) => cmd_shift_meanlimit(&config, &args.weights),
            ShiftCommand::Bridge(args) => cmd_shift_bridge(&args.weights),
        },
        Command::Verify { suite, trials, seed, dims } => {
            cmd_verify(&config, &suite, trials, seed, &dims)
        }
    }
}

fn load_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let doc = MatrixDocument::from_json(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    doc.to_matrix()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_rule(spec: &str) -> Result<WeightSequence, CliError> {
    parse_weight_spec(spec).map_err(|e| CliError::Input(format!("--weights: {e}")))
}

/// Inclusive dimension range "a..b" with `1 <= a <= b`.
fn parse_dims(text: &str) -> Result<(usize, usize), CliError> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| CliError::Usage(format!("--dims expects \"a..b\", got {text:?}")))?;
    let bound = |tok: &str| {
        tok.trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("--dims bound {tok:?} is not an integer")))
    };
    let (lo, hi) = (bound(lo)?, bound(hi)?);
    if lo < 1 || hi < lo {
        return Err(CliError::Usage(format!("--dims needs 1 <= a <= b, got {lo}..{hi}")));
    }
    Ok((lo, hi))
}

/// Fixed-point decimal with 17 significant digits: round-trip safe.
fn csv_cell(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes to stdout, exiting quietly when the read end has gone away
/// (`meanform ... | head` must not panic).
fn emit(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let outcome = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush());
    if let Err(e) = outcome {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("E3: stdout: {e}");
        std::process::exit(3);
    }
}

fn print_json(value: &Value) {
    let text = serde_json::to_string_pretty(value).expect("JSON emission cannot fail");
    emit(&text);
    emit("\n");
}

fn matrix_value(m: &CMatrix) -> Value {
    serde_json::to_value(MatrixDocument::from_matrix(m)).expect("document is serializable")
}

fn cmd_polar(file: &Path) -> Result<(), CliError> {
    let t = load_matrix(file)?;
    let parts = canonical_polar(&t).map_err(|e| CliError::Numerical(e.to_string()))?;
    print_json(&json!({
        "isometry_part": matrix_value(&parts.isometry_part),
        "modulus": matrix_value(&parts.modulus),
        "numerical_rank": parts.numerical_rank,
        "rank_tol": parts.rank_tol,
    }));
    Ok(())
}

fn cmd_transform(
    kind: TransformKind,
    lambda: Option<f64>,
    file: &Path,
) -> Result<(), CliError> {
    let t = load_matrix(file)?;
    let result = match kind {
        TransformKind::Mean => {
            if lambda.is_some() {
                return Err(CliError::Usage(
                    "--lambda only applies to --kind aluthge".to_string(),
                ));
            }
            mean_transform(&t).map_err(|e| CliError::Numerical(e.to_string()))?
        }
        TransformKind::Aluthge => {
            let lambda = lambda.unwrap_or(0.5);
            if !(0.0..=1.0).contains(&lambda) {
                return Err(CliError::Usage(format!(
                    "--lambda must lie in [0, 1], got {lambda}"
                )));
            }
            aluthge_transform(&t, lambda).map_err(|e| CliError::Numerical(e.to_string()))?
        }
    };
    emit(&MatrixDocument::from_matrix(&result).to_json());
    emit("\n");
    Ok(())
}

fn cmd_iterate(
    config: &RunConfig,
    format: OutputFormat,
    n: Option<usize>,
    tol: Option<f64>,
    file: &Path,
) -> Result<(), CliError> {
    let t = load_matrix(file)?;
    let n_max = n.or(config.n_max).unwrap_or(100);
    let stop_tol = tol.or(config.tolerances.stop).unwrap_or(DEFAULT_STOP_TOL);
    let trace =
        mean_iterates(&t, n_max, stop_tol).map_err(|e| CliError::Numerical(e.to_string()))?;
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("n,norm,numerical_radius,step_distance\n");
            for step in &trace.steps {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    step.index,
                    csv_cell(step.norm),
                    csv_cell(step.numerical_radius),
                    csv_cell(step.step_distance),
                ));
            }
            emit(&out);
        }
        OutputFormat::Json => {
            let steps: Vec<Value> = trace
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "n": s.index,
                        "norm": s.norm,
                        "numerical_radius": s.numerical_radius,
                        "step_distance": s.step_distance,
                        "quasinormal": s.quasinormal,
                    })
                })
                .collect();
            print_json(&json!({
                "converged": trace.converged,
                "limit_estimate": trace.limit_estimate,
                "steps": steps,
            }));
        }
    }
    Ok(())
}

fn cmd_meanlimit(config: &RunConfig, file: &Path) -> Result<(), CliError> {
    let t = load_matrix(file)?;
    let n_max = config.n_max.unwrap_or(DEFAULT_N_MAX);
    let stop_tol = config.tolerances.stop.unwrap_or(DEFAULT_STOP_TOL);
    let limit = mean_limit_estimate(&t, n_max, stop_tol)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    print_json(&json!({
        "value": limit.value,
        "converged": limit.converged,
        "iterations": limit.iterations,
    }));
    Ok(())
}

fn cmd_numrange(
    config: &RunConfig,
    format: OutputFormat,
    points: Option<usize>,
    file: &Path,
) -> Result<(), CliError> {
    let t = load_matrix(file)?;
    let m = points.or(config.range_points).unwrap_or(DEFAULT_RANGE_POINTS);
    let boundary =
        numerical_range_boundary(&t, m).map_err(|e| CliError::Numerical(e.to_string()))?;
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("theta,support,re,im\n");
            for s in &boundary.samples {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    csv_cell(s.theta),
                    csv_cell(s.support),
                    csv_cell(s.point.re),
                    csv_cell(s.point.im),
                ));
            }
            emit(&out);
        }
        OutputFormat::Json => {
            let samples: Vec<Value> = boundary
                .samples
                .iter()
                .map(|s| {
                    json!({
                        "theta": s.theta,
                        "support": s.support,
                        "re": s.point.re,
                        "im": s.point.im,
                    })
                })
                .collect();
            print_json(&json!({
                "num_radius": boundary.num_radius,
                "samples": samples,
            }));
        }
    }
    Ok(())
}

fn cmd_classify(config: &RunConfig, file: &Path) -> Result<(), CliError> {
    let t = load_matrix(file)?;
    let tol = config.tolerances.class.unwrap_or(DEFAULT_CLASS_TOL);
    let classes = classify(&t, tol).map_err(|e| CliError::Numerical(e.to_string()))?;
    let inclusion =
        kernel_inclusion_check(&t, tol).map_err(|e| CliError::Numerical(e.to_string()))?;
    print_json(&json!({
        "tolerance": tol,
        "classes": classes,
        "kernel_inclusion": inclusion,
    }));
    Ok(())
}

fn rule_value(rule: &WeightSequence) -> Value {
    json!({
        "spec": rule.to_spec_string(),
        "description": rule.describe(),
    })
}

fn cmd_shift_transform(spec: &str) -> Result<(), CliError> {
    let rule = parse_rule(spec)?;
    let mean = shift_mean_weights(&rule);
    let aluthge = shift_aluthge_weights(&rule);
    print_json(&json!({
        "source": rule_value(&rule),
        "mean": rule_value(&mean),
        "aluthge": rule_value(&aluthge),
    }));
    Ok(())
}

fn cmd_shift_iterate(format: OutputFormat, spec: &str, n: usize) -> Result<(), CliError> {
    let rule = parse_rule(spec)?;
    // Show past the binomial window edge, capped to keep the table plot-sized.
    let span = ((n as i64 + 33).max(64)).min(MAX_TABLE_ROWS);
    let range = match rule.laterality {
        Laterality::Unilateral => 0..span,
        Laterality::Bilateral => -(span / 2)..span / 2,
    };
    let lo = range.start;
    let weights = shift_mean_iterate_weights(&rule, n, range).map_err(weight_compute_error)?;
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("i,weight\n");
            for (offset, w) in weights.iter().enumerate() {
                out.push_str(&format!("{},{}\n", lo + offset as i64, csv_cell(*w)));
            }
            emit(&out);
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = weights
                .iter()
                .enumerate()
                .map(|(offset, w)| json!({"i": lo + offset as i64, "weight": w}))
                .collect();
            print_json(&json!({"n": n, "rows": rows}));
        }
    }
    Ok(())
}

fn cmd_shift_specradius(config: &RunConfig, spec: &str) -> Result<(), CliError> {
    let rule = parse_rule(spec)?;
    let n_max = config.n_max.unwrap_or(DEFAULT_RADIUS_N_MAX);
    let i_max = config.i_max.unwrap_or(DEFAULT_RADIUS_I_MAX);
    let estimate = shift_spectral_radius(&rule, n_max, i_max).map_err(weight_compute_error)?;
    let value = serde_json::to_value(&estimate)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    print_json(&value);
    Ok(())
}

fn cmd_shift_meanlimit(config: &RunConfig, spec: &str) -> Result<(), CliError> {
    let rule = parse_rule(spec)?;
    let mut schedule = default_n_schedule();
    if let Some(n_max) = config.n_max {
        schedule.retain(|&n| n <= n_max);
    }
    let limit =
        shift_mean_limit(&rule, &schedule, config.i_max).map_err(weight_compute_error)?;
    let value = serde_json::to_value(&limit).map_err(|e| CliError::Numerical(e.to_string()))?;
    print_json(&value);
    Ok(())
}

fn cmd_shift_bridge(spec: &str) -> Result<(), CliError> {
    let rule = parse_rule(spec)?;
    let report = exp_log_bridge(&rule).map_err(weight_compute_error)?;
    let value = serde_json::to_value(report).map_err(|e| CliError::Numerical(e.to_string()))?;
    print_json(&value);
    Ok(())
}

fn cmd_verify(
    config: &RunConfig,
    suite: &str,
    trials: Option<u64>,
    seed: Option<u64>,
    dims: &str,
) -> Result<(), CliError> {
    let suites: Vec<SuiteId> = if suite == "all" {
        SuiteId::ALL.into_iter().filter(|&s| s != SuiteId::SelfTest).collect()
    } else {
        vec![SuiteId::parse(suite).map_err(|e| CliError::Usage(e.to_string()))?]
    };
    let trials = trials.unwrap_or(100);
    let seed = seed.or(config.seed).unwrap_or(0);
    let dims = parse_dims(dims)?;

    let mut reports = Vec::with_capacity(suites.len());
    for s in suites {
        let report = run_suite(s, trials, seed, dims);
        eprintln!("{}", report.summary_line());
        reports.push(report);
    }
    let value = serde_json::to_value(&reports).map_err(|e| CliError::Numerical(e.to_string()))?;
    print_json(&value);

    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Violations { failed, total: reports.len() });
    }
    Ok(())
}
