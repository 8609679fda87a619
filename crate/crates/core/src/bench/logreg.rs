use std::time::Instant;

use ndarray::{s, Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{worker_pool, BenchError, CellFailure, RunRecord, SuiteOutcome};
use crate::objectives::LogisticObjective;
use crate::prox::{project_box, BoxConstraint};
use crate::solvers::{fista_l1, solve, Method, MethodOptions, Problem, SolverConfig, StopRule};

const MAX_DRAWS_PER_SAMPLE: usize = 10_000;

/// Samples as rows, labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledData {
    pub samples: Array2<f64>,
    pub labels: Array1<f64>,
}

impl LabeledData {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.samples.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogregDataset {
    pub train: LabeledData,
    pub test: LabeledData,
    /// Ground-truth sparsity, when known.
    pub s_true: Option<usize>,
}

/// Test accuracy of `[u; v]`: fraction of samples with `sign(uᵀx + v) = y`,
/// counting a zero score as `+1`.
pub fn accuracy(weights: &Array1<f64>, data: &LabeledData) -> f64 {
    let n = data.n_features();
    assert_eq!(weights.len(), n + 1, "weights must carry an intercept");
    if data.is_empty() {
        return f64::NAN;
    }
    let u = weights.slice(s![..n]);
    let v = weights[n];
    let hits = data
        .samples
        .rows()
        .into_iter()
        .zip(data.labels.iter())
        .filter(|(row, &y)| {
            let pred = if row.dot(&u) + v >= 0.0 { 1.0 } else { -1.0 };
            pred == y
        })
        .count();
    hits as f64 / data.len() as f64
}

/// Parameters of [`gen_synthetic_logreg`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticLogregConfig {
    /// Samples per split; train and test each get this many.
    pub n_samples: usize,
    pub n_features: usize,
    pub s_true: usize,
    pub margin: f64,
    pub seed: u64,
}

impl Default for SyntheticLogregConfig {
    fn default() -> Self {
        Self {
            n_samples: 500,
            n_features: 200,
            s_true: 10,
            margin: 0.1,
            seed: 2024,
        }
    }
}

impl SyntheticLogregConfig {
    pub fn generate(&self) -> Result<LogregDataset, BenchError> {
        gen_synthetic_logreg(self.n_samples, self.n_features, self.s_true, self.margin, self.seed)
    }
}

/// Separable data from a sparse unit-norm hyperplane `(w, v)`: features are
/// i.i.d. standard normal, labels `sign(wᵀx + v)`, and samples with
/// `|wᵀx + v| < margin` are redrawn. Train and test splits of `n_samples`
/// each. With `s_true = 0` the labels come from the intercept alone.
pub fn gen_synthetic_logreg(
    n_samples: usize,
    n_features: usize,
    s_true: usize,
    margin: f64,
    seed: u64,
) -> Result<LogregDataset, BenchError> {
    if n_samples == 0 || n_features == 0 {
        return Err(BenchError::EmptyDimension {
            m: n_samples,
            n: n_features,
        });
    }
    if s_true > n_features {
        return Err(BenchError::SparsityExceedsDimension { s: s_true, n: n_features });
    }
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(BenchError::InvalidConfig(format!("margin must be nonnegative, got {margin}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut w = Array1::<f64>::zeros(n_features);
    let v;
    if s_true == 0 {
        v = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    } else {
        for i in rand::seq::index::sample(&mut rng, n_features, s_true) {
            w[i] = rng.sample(StandardNormal);
        }
        let norm = w.dot(&w).sqrt();
        if norm > 0.0 {
            w /= norm;
        }
        v = rng.random_range(-0.2..0.2);
    }

    let split = |rng: &mut ChaCha8Rng| -> Result<LabeledData, BenchError> {
        let mut samples = Array2::zeros((n_samples, n_features));
        let mut labels = Array1::zeros(n_samples);
        for (i, mut row) in samples.rows_mut().into_iter().enumerate() {
            let mut attempts = 0;
            let score = loop {
                attempts += 1;
                row.mapv_inplace(|_| rng.sample(StandardNormal));
                let score = row.dot(&w) + v;
                if score.abs() >= margin {
                    break score;
                }
                if attempts >= MAX_DRAWS_PER_SAMPLE {
                    return Err(BenchError::MarginUnreachable { margin, attempts });
                }
            };
            labels[i] = if score > 0.0 { 1.0 } else { -1.0 };
        }
        Ok(LabeledData { samples, labels })
    };
    let train = split(&mut rng)?;
    let test = split(&mut rng)?;
    Ok(LogregDataset {
        train,
        test,
        s_true: Some(s_true),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogregSuiteConfig {
    pub methods: Vec<Method>,
    pub bound: f64,
    pub warm_lambda: f64,
    pub warm_tol: f64,
    pub warm_max_iter: usize,
    pub solver: SolverConfig,
    pub options: MethodOptions,
    pub synthetic: SyntheticLogregConfig,
    #[serde(skip)]
    pub keep_results: bool,
}

impl Default for LogregSuiteConfig {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            bound: 1e10,
            warm_lambda: 1e-3,
            warm_tol: 0.02,
            warm_max_iter: 10_000,
            solver: SolverConfig::logistic(),
            options: MethodOptions {
                nmapg_eta: 0.6,
                ..MethodOptions::default()
            },
            synthetic: SyntheticLogregConfig::default(),
            keep_results: false,
        }
    }
}

impl LogregSuiteConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.methods.is_empty() {
            return Err(BenchError::InvalidConfig("no methods selected".into()));
        }
        if !(self.bound > 0.0) {
            return Err(BenchError::InvalidConfig(format!("bound must be positive, got {}", self.bound)));
        }
        if !(self.warm_lambda > 0.0 && self.warm_tol > 0.0 && self.warm_max_iter > 0) {
            return Err(BenchError::InvalidConfig("warm-start settings must be positive".into()));
        }
        self.solver.validate().map_err(|e| BenchError::InvalidConfig(e.to_string()))
    }
}

/// Fit `[u; v]` on the training split (intercept unpenalized) from a
/// FISTA-ℓ1 warm start at zero, then score each method on the test split.
pub fn run_logreg_suite(dataset: &LogregDataset, cfg: &LogregSuiteConfig) -> Result<SuiteOutcome, BenchError> {
    cfg.validate()?;
    let n = dataset.train.n_features();
    if dataset.test.n_features() != n {
        return Err(BenchError::LengthMismatch(n, dataset.test.n_features()));
    }
    let s = dataset.s_true.unwrap_or(0);
    let fail_all = |message: String| {
        let failures = cfg
            .methods
            .iter()
            .map(|&m| CellFailure {
                method: Some(m),
                n,
                s,
                replicate: 0,
                message: message.clone(),
            })
            .collect();
        SuiteOutcome::assemble(Vec::new(), failures)
    };

    let objective = match LogisticObjective::new(&dataset.train.samples, dataset.train.labels.clone()) {
        Ok(o) => o,
        Err(e) => return Ok(fail_all(e.to_string())),
    };
    let mask = objective.penalty_mask();
    let dim = n + 1;

    let warm_clock = Instant::now();
    let warm = match fista_l1(
        &objective,
        cfg.warm_lambda,
        &Array1::zeros(dim),
        StopRule::InfNorm(cfg.warm_tol),
        cfg.warm_max_iter,
        Some(&mask),
    ) {
        Ok(w) => w,
        Err(e) => return Ok(fail_all(format!("warm start: {e}"))),
    };
    let bounds = BoxConstraint::uniform(dim, -cfg.bound, cfg.bound).map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
    let x0 = project_box(&warm.x, &bounds);
    let warm_time = warm_clock.elapsed().as_secs_f64();

    let problem = match Problem::new(&objective, bounds).and_then(|p| p.with_penalty_mask(mask.clone())) {
        Ok(p) => p,
        Err(e) => return Ok(fail_all(e.to_string())),
    };

    let pool = worker_pool()?;
    let outcomes: Vec<Result<RunRecord, CellFailure>> = pool.install(|| {
        cfg.methods
            .par_iter()
            .map(|&method| {
                let clock = Instant::now();
                let res = solve(method, &problem, &cfg.solver, &cfg.options, &x0).map_err(|e| CellFailure {
                    method: Some(method),
                    n,
                    s,
                    replicate: 0,
                    message: e.to_string(),
                })?;
                let runtime = warm_time + clock.elapsed().as_secs_f64();
                Ok(RunRecord {
                    method,
                    n,
                    s,
                    replicate: 0,
                    status: res.status,
                    iterations: res.iterations,
                    warm_iterations: warm.iterations,
                    runtime,
                    relerr: None,
                    l0: penalized_l0(res.x.view(), &mask),
                    ncf: res.trace.ncf_total(),
                    ncgf: res.trace.ncgf_total(),
                    warm_ncgf: warm.ncgf,
                    restarts: res.trace.restarts(),
                    accuracy: Some(accuracy(&res.x, &dataset.test)),
                    result: cfg.keep_results.then_some(res),
                })
            })
            .collect()
    });

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => runs.push(r),
            Err(f) => failures.push(f),
        }
    }
    Ok(SuiteOutcome::assemble(runs, failures))
}

fn penalized_l0(x: ArrayView1<'_, f64>, mask: &[bool]) -> usize {
    x.iter().zip(mask).filter(|(v, &p)| p && **v != 0.0).count()
}
