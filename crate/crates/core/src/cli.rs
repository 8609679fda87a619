//! Command-line front end: `solve`, `bench-cs`, `bench-logreg`, `check`.
//!
//! Settings are layered: built-in defaults, then the TOML file given with
//! `--config`, then individual flags. The effective settings are written to
//! `config.toml` in the output directory and can be fed back with `--config`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ndarray::Array1;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::{
    gen_cs_instance, relative_error, run_cs_suite, run_logreg_suite, BenchError, CsSuiteConfig,
    ExperimentReport, LabeledData, LogregDataset, LogregSuiteConfig, SuiteOutcome,
};
use crate::check::{run_checks, Fault, Suite};
use crate::io::{
    format_g6, load_dense_matrix, load_libsvm, read_vector, write_report_csv, write_report_json, write_trace_csv,
    write_vector, IoError, DEFAULT_DENSE_CAP,
};
use crate::objectives::{LeastSquaresObjective, LogisticObjective, ObjectiveError, SmoothObjective};
use crate::prox::{project_box, BoxConstraint};
use crate::solvers::{
    fista_l1, solve, Method, MethodOptions, Problem, SolverConfig, SolverError, Status, StopRule, UnknownMethod,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MAX_ITER: i32 = 2;
pub const EXIT_CELL_FAILED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    UnknownMethod(#[from] UnknownMethod),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Parser)]
#[command(name = "sparse-l0", version, about = "Box-constrained l0-regularized solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem and write the iterate, a summary and the trace.
    Solve(SolveArgs),
    /// Run the compressive-sensing suite.
    BenchCs(BenchCsArgs),
    /// Run the sparse logistic regression suite.
    BenchLogreg(BenchLogregArgs),
    /// Run the built-in invariant suites.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// TOML file with settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed for generated data.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Iteration cap of the l0 method.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Stopping tolerance (the rule itself is kept).
    #[arg(long)]
    tol: Option<f64>,
    /// Weight of the l0 term.
    #[arg(long)]
    lambda: Option<f64>,
    /// Proximal term weight; steps are 1/(L+mu).
    #[arg(long)]
    mu: Option<f64>,
    /// Extrapolation weight in (0, 1).
    #[arg(long)]
    omega: Option<f64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// piht, ifb, mapg, nmapg, epiht or apiht.
    #[arg(long)]
    method: Option<String>,
    /// Generate a compressive-sensing instance, e.g. `m=100,n=300,s=3`.
    #[arg(long, value_name = "SPEC")]
    gen_cs: Option<String>,
    /// Dense matrix file for a least-squares problem.
    #[arg(long, requires = "rhs")]
    matrix: Option<PathBuf>,
    /// Right-hand side, one value per line.
    #[arg(long, requires = "matrix")]
    rhs: Option<PathBuf>,
    /// LIBSVM file for a logistic regression problem.
    #[arg(long)]
    libsvm: Option<PathBuf>,
    /// Feature count of the LIBSVM file (inferred when absent).
    #[arg(long)]
    n_features: Option<usize>,
    /// Read the generator noise level as a standard deviation.
    #[arg(long)]
    noise_as_std: bool,
    /// Start the l0 method directly from zero instead of a FISTA warm start.
    #[arg(long)]
    cold_start: bool,
}

#[derive(Debug, Args)]
struct BenchCsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated subset of methods.
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    /// Replicates per (n, s) cell.
    #[arg(long)]
    replicates: Option<usize>,
    /// Use the large sizes (m=3000, n up to 20000, 50 replicates).
    #[arg(long)]
    full_scale: bool,
    /// Read the generator noise level as a standard deviation.
    #[arg(long)]
    noise_as_std: bool,
}

#[derive(Debug, Args)]
struct BenchLogregArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated subset of methods.
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    /// LIBSVM training file; synthetic data is generated when absent.
    #[arg(long, requires = "test")]
    train: Option<PathBuf>,
    /// LIBSVM test file.
    #[arg(long, requires = "train")]
    test: Option<PathBuf>,
    /// Feature count of the LIBSVM files (inferred when absent).
    #[arg(long)]
    n_features: Option<usize>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Run only the named suites (comma-separated: prox, gradient, descent, restart).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Seed of the randomized cases.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::BenchCs(a) => cmd_bench_cs(&a),
        Command::BenchLogreg(a) => cmd_bench_logreg(&a),
        Command::Check(a) => cmd_check(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn merge(base: &mut toml::Value, overlay: toml::Value) {
    match (base, overlay) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn read_table(path: &Path) -> Result<toml::Table, CliError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
}

/// `base` with the file's keys laid over it.
fn layered<T: Serialize + DeserializeOwned>(base: &T, file: Option<toml::Table>) -> Result<T, CliError> {
    let mut value = toml::Value::try_from(base).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(t) = file {
        merge(&mut value, toml::Value::Table(t));
    }
    value.try_into().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))
}

fn apply_solver_flags(cfg: &mut SolverConfig, c: &CommonArgs) {
    if let Some(v) = c.max_iter {
        cfg.max_iter = v;
    }
    if let Some(v) = c.tol {
        cfg.stop = cfg.stop.with_tol(v);
    }
    if let Some(v) = c.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = c.mu {
        cfg.mu = v;
    }
    if let Some(v) = c.omega {
        cfg.omega = v;
    }
}

fn parse_methods(names: &[String]) -> Result<Option<Vec<Method>>, CliError> {
    if names.is_empty() {
        return Ok(None);
    }
    let mut methods = names.iter().map(|n| n.parse()).collect::<Result<Vec<Method>, _>>()?;
    methods.sort();
    methods.dedup();
    Ok(Some(methods))
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    Ok(())
}

fn echo_config<T: Serialize>(cfg: &T, dir: &Path) -> Result<(), CliError> {
    let text = toml::to_string(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let path = dir.join("config.toml");
    fs::write(&path, text).map_err(|e| IoError::io(&path, e))?;
    Ok(())
}

/// `m=…,n=…,s=…[,noise=…]`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsSpec {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    /// Variance unless the noise is read as a standard deviation.
    #[serde(default = "default_noise")]
    pub noise: f64,
}

fn default_noise() -> f64 {
    0.05
}

impl FromStr for CsSpec {
    type Err = String;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let (mut m, mut n, mut s, mut noise) = (None, None, None, default_noise());
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got '{part}'"))?;
            let int = || value.trim().parse::<usize>().map_err(|_| format!("bad value for {key}: '{value}'"));
            match key.trim() {
                "m" => m = Some(int()?),
                "n" => n = Some(int()?),
                "s" => s = Some(int()?),
                "noise" => noise = value.trim().parse().map_err(|_| format!("bad noise value '{value}'"))?,
                other => return Err(format!("unknown key '{other}' in generator spec")),
            }
        }
        match (m, n, s) {
            (Some(m), Some(n), Some(s)) => Ok(CsSpec { m, n, s, noise }),
            _ => Err(format!("generator spec '{spec}' needs m, n and s")),
        }
    }
}

/// Effective settings of a `solve` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub method: Method,
    pub seed: u64,
    pub bound: f64,
    pub warm_start: bool,
    pub warm_lambda: f64,
    pub warm_tol: f64,
    pub warm_max_iter: usize,
    pub noise_as_std: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_cs: Option<CsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub libsvm: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_features: Option<usize>,
    pub solver: SolverConfig,
    pub options: MethodOptions,
}

impl SolveConfig {
    fn least_squares() -> Self {
        Self {
            method: Method::Apiht,
            seed: 0,
            bound: 1e10,
            warm_start: true,
            warm_lambda: 0.1,
            warm_tol: 1e-2,
            warm_max_iter: 10_000,
            noise_as_std: false,
            gen_cs: None,
            matrix: None,
            rhs: None,
            libsvm: None,
            n_features: None,
            solver: SolverConfig::default(),
            options: MethodOptions::default(),
        }
    }

    fn logistic() -> Self {
        Self {
            warm_lambda: 1e-3,
            warm_tol: 0.02,
            solver: SolverConfig::logistic(),
            options: MethodOptions {
                nmapg_eta: 0.6,
                ..MethodOptions::default()
            },
            ..Self::least_squares()
        }
    }
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    method: Method,
    status: Status,
    iterations: usize,
    warm_iterations: usize,
    objective: f64,
    l0: usize,
    ncf: usize,
    ncgf: usize,
    restarts: usize,
    lipschitz: f64,
    runtime_secs: f64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    relerr: Option<f64>,
}

fn cmd_solve(args: &SolveArgs) -> Result<i32, CliError> {
    let file = args.common.config.as_deref().map(read_table).transpose()?;
    let logistic = args.libsvm.is_some() || file.as_ref().is_some_and(|t| t.contains_key("libsvm"));
    let base = if logistic {
        SolveConfig::logistic()
    } else {
        SolveConfig::least_squares()
    };
    let mut cfg = layered(&base, file)?;
    if let Some(m) = &args.method {
        cfg.method = m.parse()?;
    }
    if let Some(seed) = args.common.seed {
        cfg.seed = seed;
    }
    if let Some(spec) = &args.gen_cs {
        cfg.gen_cs = Some(spec.parse().map_err(CliError::Usage)?);
    }
    if args.matrix.is_some() {
        cfg.matrix = args.matrix.clone();
        cfg.rhs = args.rhs.clone();
    }
    if args.libsvm.is_some() {
        cfg.libsvm = args.libsvm.clone();
    }
    if args.n_features.is_some() {
        cfg.n_features = args.n_features;
    }
    cfg.noise_as_std |= args.noise_as_std;
    cfg.warm_start &= !args.cold_start;
    apply_solver_flags(&mut cfg.solver, &args.common);
    cfg.solver.validate()?;

    let sources = [cfg.gen_cs.is_some(), cfg.matrix.is_some(), cfg.libsvm.is_some()];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(CliError::Usage(
            "give exactly one problem source: --gen-cs, --matrix/--rhs or --libsvm".into(),
        ));
    }

    let mut truth = None;
    let objective: Box<dyn SmoothObjective> = if let Some(spec) = cfg.gen_cs {
        let sigma = if cfg.noise_as_std { spec.noise } else { spec.noise.sqrt() };
        let inst = gen_cs_instance(spec.m, spec.n, spec.s, sigma, cfg.seed)?;
        truth = Some(inst.x_true);
        Box::new(LeastSquaresObjective::new(inst.a, inst.b)?)
    } else if let (Some(mpath), Some(rpath)) = (&cfg.matrix, &cfg.rhs) {
        Box::new(LeastSquaresObjective::new(load_dense_matrix(mpath)?, read_vector(rpath)?)?)
    } else {
        let path = cfg.libsvm.as_ref().expect("one source is set");
        let (x, y) = load_libsvm(path, cfg.n_features, DEFAULT_DENSE_CAP)?;
        Box::new(LogisticObjective::new(&x, y)?)
    };
    let dim = objective.dim();
    let mask = logistic.then(|| {
        let mut m = vec![true; dim];
        m[dim - 1] = false;
        m
    });

    prepare_out(&args.common.out)?;
    echo_config(&cfg, &args.common.out)?;

    let bounds = BoxConstraint::uniform(dim, -cfg.bound, cfg.bound).map_err(|e| CliError::Config(e.to_string()))?;
    let clock = Instant::now();
    let (x0, warm_iterations) = if cfg.warm_start {
        let (start, stop) = if logistic {
            (Array1::zeros(dim), StopRule::InfNorm(cfg.warm_tol))
        } else {
            (start_point(objective.as_ref(), dim), StopRule::RelChange(cfg.warm_tol))
        };
        let warm = fista_l1(
            objective.as_ref(),
            cfg.warm_lambda,
            &start,
            stop,
            cfg.warm_max_iter,
            mask.as_deref(),
        )?;
        (project_box(&warm.x, &bounds), warm.iterations)
    } else {
        (Array1::zeros(dim), 0)
    };
    let mut problem = Problem::new(objective.as_ref(), bounds)?;
    if let Some(m) = mask {
        problem = problem.with_penalty_mask(m)?;
    }
    let result = solve(cfg.method, &problem, &cfg.solver, &cfg.options, &x0)?;
    let runtime = clock.elapsed().as_secs_f64();

    let out = &args.common.out;
    write_vector(&result.x, out.join("x_final.txt"))?;
    write_trace_csv(&result.trace, out.join("trace.csv"))?;
    let summary = SolveSummary {
        method: result.method,
        status: result.status,
        iterations: result.iterations,
        warm_iterations,
        objective: result.trace.last().map_or(result.trace.initial_objective, |r| r.objective),
        l0: problem.l0_count(&result.x),
        ncf: result.trace.ncf_total(),
        ncgf: result.trace.ncgf_total(),
        restarts: result.trace.restarts(),
        lipschitz: problem.lipschitz(),
        runtime_secs: runtime,
        seed: cfg.seed,
        relerr: truth.as_ref().and_then(|t| relative_error(&result.x, t).ok()),
    };
    let path = out.join("result.json");
    let json = serde_json::to_string_pretty(&summary).map_err(|source| IoError::Json {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, json + "\n").map_err(|e| IoError::io(&path, e))?;

    let status = match result.status {
        Status::Converged => "converged",
        Status::MaxIter => "max-iter",
    };
    println!(
        "{} {status} after {} iterations (+{} warm start), H = {}, l0 = {}{}",
        result.method,
        result.iterations,
        warm_iterations,
        format_g6(summary.objective),
        summary.l0,
        summary.relerr.map(|r| format!(", relerr = {}", format_g6(r))).unwrap_or_default()
    );
    Ok(match result.status {
        Status::Converged => EXIT_OK,
        Status::MaxIter => EXIT_MAX_ITER,
    })
}

/// `Aᵀb` for least squares, i.e. `−∇f(0)`.
fn start_point(objective: &dyn SmoothObjective, dim: usize) -> Array1<f64> {
    -objective.gradient(&Array1::zeros(dim))
}

fn cmd_bench_cs(args: &BenchCsArgs) -> Result<i32, CliError> {
    let file = args.common.config.as_deref().map(read_table).transpose()?;
    let base = if args.full_scale {
        CsSuiteConfig::full_scale()
    } else {
        CsSuiteConfig::desk()
    };
    let mut cfg = layered(&base, file)?;
    if let Some(seed) = args.common.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    cfg.noise_as_std |= args.noise_as_std;
    if let Some(methods) = parse_methods(&args.method)? {
        cfg.methods = methods;
    }
    apply_solver_flags(&mut cfg.solver, &args.common);
    cfg.validate()?;

    prepare_out(&args.common.out)?;
    echo_config(&cfg, &args.common.out)?;
    log::info!(
        "running {} cells x {} replicates x {} methods",
        cfg.sizes.len(),
        cfg.replicates,
        cfg.methods.len()
    );
    let outcome = run_cs_suite(&cfg)?;
    finish_bench(&outcome, &args.common.out, false)
}

/// Settings of `bench-logreg`: the suite plus optional LIBSVM inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogregRunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_features: Option<usize>,
    #[serde(flatten)]
    pub suite: LogregSuiteConfig,
}

fn cmd_bench_logreg(args: &BenchLogregArgs) -> Result<i32, CliError> {
    let file = args.common.config.as_deref().map(read_table).transpose()?;
    let base = LogregRunConfig {
        train: None,
        test: None,
        n_features: None,
        suite: LogregSuiteConfig::default(),
    };
    let mut cfg = layered(&base, file)?;
    if let Some(seed) = args.common.seed {
        cfg.suite.synthetic.seed = seed;
    }
    if args.train.is_some() {
        cfg.train = args.train.clone();
        cfg.test = args.test.clone();
    }
    if args.n_features.is_some() {
        cfg.n_features = args.n_features;
    }
    if let Some(methods) = parse_methods(&args.method)? {
        cfg.suite.methods = methods;
    }
    apply_solver_flags(&mut cfg.suite.solver, &args.common);
    cfg.suite.validate()?;

    let dataset = match (&cfg.train, &cfg.test) {
        (Some(train), Some(test)) => {
            let (xs, ys) = load_libsvm(train, cfg.n_features, DEFAULT_DENSE_CAP)?;
            let width = cfg.n_features.unwrap_or(xs.ncols());
            let (xt, yt) = load_libsvm(test, Some(width), DEFAULT_DENSE_CAP)?;
            let xs = if xs.ncols() < width { pad_columns(xs, width) } else { xs };
            LogregDataset {
                train: LabeledData { samples: xs, labels: ys },
                test: LabeledData { samples: xt, labels: yt },
                s_true: None,
            }
        }
        (None, None) => cfg.suite.synthetic.generate()?,
        _ => return Err(CliError::Usage("give both train and test files".into())),
    };

    prepare_out(&args.common.out)?;
    echo_config(&cfg, &args.common.out)?;
    let outcome = run_logreg_suite(&dataset, &cfg.suite)?;
    finish_bench(&outcome, &args.common.out, true)
}

fn pad_columns(x: ndarray::Array2<f64>, width: usize) -> ndarray::Array2<f64> {
    let mut out = ndarray::Array2::zeros((x.nrows(), width));
    out.slice_mut(ndarray::s![.., ..x.ncols()]).assign(&x);
    out
}

fn finish_bench(outcome: &SuiteOutcome, out: &Path, logistic: bool) -> Result<i32, CliError> {
    write_report_csv(&outcome.report, out.join("report.csv"))?;
    write_report_json(&outcome.report, out.join("report.json"))?;
    if logistic {
        print!("{}", render_logreg_table(&outcome.report));
    } else {
        print!("{}", render_cs_tables(&outcome.report));
    }
    if outcome.all_succeeded() {
        return Ok(EXIT_OK);
    }
    println!("\nfailures:");
    for f in &outcome.failures {
        let method = f.method.map_or_else(|| "-".to_string(), |m| m.to_string());
        println!("  {method} n={} s={} replicate={}: {}", f.n, f.s, f.replicate, f.message);
    }
    Ok(EXIT_CELL_FAILED)
}

/// One block per metric, `(n, s)` rows and one column per method.
pub fn render_cs_tables(report: &ExperimentReport) -> String {
    let mut methods: Vec<Method> = report.rows.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let mut cells: Vec<(usize, usize)> = report.rows.iter().map(|r| (r.n, r.s)).collect();
    cells.sort();
    cells.dedup();

    type Metric = fn(&crate::bench::ReportRow) -> String;
    let blocks: [(&str, Metric); 5] = [
        ("relative error (mean/std)", |r| {
            format!("{}/{}", fmt_opt(r.relerr_mean), fmt_opt(r.relerr_std))
        }),
        ("iterations (mean/std)", |r| format!("{:.1}/{:.1}", r.iters_mean, r.iters_std)),
        ("time in seconds (mean/std)", |r| format!("{:.3}/{:.3}", r.time_mean, r.time_std)),
        ("l0 norm (mean)", |r| format!("{:.1}", r.l0_mean)),
        ("total NCGf (mean) / restart rate", |r| {
            format!("{:.1}/{:.3}", r.ncgf_total_mean, r.restart_rate)
        }),
    ];
    let mut text = String::new();
    for (title, metric) in blocks {
        let mut grid = vec![std::iter::once("(n, s)".to_string())
            .chain(methods.iter().map(|m| m.to_string()))
            .collect::<Vec<_>>()];
        for &(n, s) in &cells {
            let mut line = vec![format!("({n}, {s})")];
            for &m in &methods {
                line.push(report.row(m, n, s).map_or_else(|| "-".into(), metric));
            }
            grid.push(line);
        }
        let _ = writeln!(text, "\n{title}");
        text.push_str(&align(&grid));
    }
    text
}

pub fn render_logreg_table(report: &ExperimentReport) -> String {
    let mut grid = vec![["method", "iterations", "time (s)", "accuracy", "l0"].map(String::from).to_vec()];
    let mut rows = report.rows.clone();
    rows.sort_by_key(|r| r.method);
    for r in &rows {
        grid.push(vec![
            r.method.to_string(),
            format!("{:.0}", r.iters_mean),
            format!("{:.3}", r.time_mean),
            fmt_opt(r.accuracy_mean),
            format!("{:.0}", r.l0_mean),
        ]);
    }
    format!("\n{}", align(&grid))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

fn align(grid: &[Vec<String>]) -> String {
    let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| grid.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in grid {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| if c == 0 { format!("{s:<w$}", w = widths[c]) } else { format!("{s:>w$}", w = widths[c]) })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

fn cmd_check(args: &CheckArgs) -> Result<i32, CliError> {
    let suites = if args.only.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.only
            .iter()
            .map(|s| s.parse::<Suite>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::Usage)?
    };
    let fault = args.inject_fault.then_some(Fault::TieRuleFlip);
    let outcomes = run_checks(&suites, fault, args.seed);
    for o in &outcomes {
        println!("{o}");
    }
    let passed = outcomes.iter().all(|o| o.passed);
    Ok(if passed { EXIT_OK } else { EXIT_ERROR })
}
