use std::time::Instant;

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, l0_norm, relative_error, worker_pool, BenchError, CellFailure, RunRecord, SuiteOutcome};
use crate::linalg::{mat_t_vec, mat_vec};
use crate::objectives::LeastSquaresObjective;
use crate::prox::{project_box, BoxConstraint};
use crate::solvers::{fista_l1, solve, Method, MethodOptions, Problem, SolverConfig, StopRule};

/// `(n, s)` cells at desk scale, `m = 750`.
pub const DESK_SIZES: [(usize, usize); 6] = [(2000, 20), (2000, 40), (3500, 35), (3500, 70), (5000, 50), (5000, 100)];

/// `(n, s)` cells at full scale, `m = 3000`.
pub const FULL_SCALE_SIZES: [(usize, usize); 6] =
    [(8000, 80), (8000, 160), (14000, 140), (14000, 280), (20000, 200), (20000, 400)];

/// A compressive-sensing problem `b = A x_true + η` with known ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct CsInstance {
    /// `m × n`, unit-norm columns.
    pub a: Array2<f64>,
    pub b: Array1<f64>,
    /// `s` entries equal to ±1, zeros elsewhere.
    pub x_true: Array1<f64>,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Gaussian sensing matrix with normalized columns, `s` random ±1 spikes and
/// i.i.d. `N(0, noise_sigma²)` noise. Deterministic in `seed`.
pub fn gen_cs_instance(m: usize, n: usize, s: usize, noise_sigma: f64, seed: u64) -> Result<CsInstance, BenchError> {
    if m == 0 || n == 0 {
        return Err(BenchError::EmptyDimension { m, n });
    }
    if s > n {
        return Err(BenchError::SparsityExceedsDimension { s, n });
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(BenchError::InvalidConfig(format!("noise level must be nonnegative, got {noise_sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut a = Array2::from_shape_simple_fn((m, n), || rng.sample::<f64, _>(StandardNormal));
    let mut sq = Array1::<f64>::zeros(n);
    for row in a.axis_iter(Axis(0)) {
        sq.zip_mut_with(&row, |acc, &v| *acc += v * v);
    }
    let inv = sq.mapv(|v| 1.0 / v.sqrt());
    for mut row in a.axis_iter_mut(Axis(0)) {
        row *= &inv;
    }

    let mut x_true = Array1::zeros(n);
    for i in rand::seq::index::sample(&mut rng, n, s) {
        x_true[i] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    }

    let mut b = mat_vec(&a, &x_true);
    for bi in b.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *bi += noise_sigma * z;
    }
    Ok(CsInstance {
        a,
        b,
        x_true,
        m,
        n,
        s,
        noise_sigma,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsSuiteConfig {
    pub m: usize,
    pub sizes: Vec<(usize, usize)>,
    pub replicates: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    /// Noise level; a variance unless `noise_as_std`.
    pub noise: f64,
    pub noise_as_std: bool,
    /// Half-width of the box `[−bound, bound]ⁿ`.
    pub bound: f64,
    pub warm_lambda: f64,
    pub warm_tol: f64,
    pub warm_max_iter: usize,
    pub solver: SolverConfig,
    pub options: MethodOptions,
    /// Keep every `SolverResult` (with trace) in the outcome.
    #[serde(skip)]
    pub keep_results: bool,
}

impl Default for CsSuiteConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl CsSuiteConfig {
    pub fn desk() -> Self {
        Self {
            m: 750,
            sizes: DESK_SIZES.to_vec(),
            replicates: 20,
            methods: Method::ALL.to_vec(),
            seed: 2024,
            noise: 0.05,
            noise_as_std: false,
            bound: 1e10,
            warm_lambda: 0.1,
            warm_tol: 1e-2,
            warm_max_iter: 10_000,
            solver: SolverConfig::default(),
            options: MethodOptions::default(),
            keep_results: false,
        }
    }

    pub fn full_scale() -> Self {
        Self {
            m: 3000,
            sizes: FULL_SCALE_SIZES.to_vec(),
            replicates: 50,
            ..Self::desk()
        }
    }

    /// Standard deviation of the measurement noise.
    pub fn noise_sigma(&self) -> f64 {
        if self.noise_as_std {
            self.noise
        } else {
            self.noise.sqrt()
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::InvalidConfig(msg));
        if self.replicates == 0 {
            return bad("replicates must be positive".into());
        }
        if self.m == 0 {
            return bad("m must be positive".into());
        }
        if self.sizes.is_empty() {
            return bad("no (n, s) sizes given".into());
        }
        if let Some(&(n, s)) = self.sizes.iter().find(|(n, s)| *n == 0 || s > n) {
            return bad(format!("invalid size (n={n}, s={s})"));
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!("noise must be nonnegative, got {}", self.noise));
        }
        if !(self.bound > 0.0) {
            return bad(format!("bound must be positive, got {}", self.bound));
        }
        if !(self.warm_lambda > 0.0 && self.warm_tol > 0.0 && self.warm_max_iter > 0) {
            return bad("warm-start settings must be positive".into());
        }
        self.solver.validate().map_err(|e| BenchError::InvalidConfig(e.to_string()))
    }
}

/// Every `(n, s, replicate)` cell: generate, warm start with FISTA-ℓ1 from
/// `Aᵀb`, then run each method from the projected warm start. Warm-start
/// iterations and time are added to each method's totals; failures are
/// recorded per cell and do not stop the suite.
pub fn run_cs_suite(cfg: &CsSuiteConfig) -> Result<SuiteOutcome, BenchError> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&(n, s)| (0..cfg.replicates).map(move |r| (n, s, r)))
        .collect();
    let pool = worker_pool()?;
    let results: Vec<(Vec<RunRecord>, Vec<CellFailure>)> =
        pool.install(|| jobs.par_iter().map(|&(n, s, r)| run_replicate(cfg, n, s, r)).collect());

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in results {
        runs.extend(r);
        failures.extend(f);
    }
    Ok(SuiteOutcome::assemble(runs, failures))
}

fn run_replicate(cfg: &CsSuiteConfig, n: usize, s: usize, replicate: usize) -> (Vec<RunRecord>, Vec<CellFailure>) {
    let fail_all = |message: String| {
        let failures = cfg
            .methods
            .iter()
            .map(|&m| CellFailure {
                method: Some(m),
                n,
                s,
                replicate,
                message: message.clone(),
            })
            .collect();
        (Vec::new(), failures)
    };

    let seed = derive_seed(cfg.seed, &[n as u64, s as u64, replicate as u64]);
    let inst = match gen_cs_instance(cfg.m, n, s, cfg.noise_sigma(), seed) {
        Ok(inst) => inst,
        Err(e) => return fail_all(e.to_string()),
    };
    let CsInstance { a, b, x_true, .. } = inst;
    let objective = match LeastSquaresObjective::new(a, b) {
        Ok(o) => o,
        Err(e) => return fail_all(e.to_string()),
    };
    let bounds = match BoxConstraint::uniform(n, -cfg.bound, cfg.bound) {
        Ok(b) => b,
        Err(e) => return fail_all(e.to_string()),
    };

    let warm_clock = Instant::now();
    let start = mat_t_vec(objective.matrix(), objective.rhs());
    let warm = match fista_l1(
        &objective,
        cfg.warm_lambda,
        &start,
        StopRule::RelChange(cfg.warm_tol),
        cfg.warm_max_iter,
        None,
    ) {
        Ok(w) => w,
        Err(e) => return fail_all(format!("warm start: {e}")),
    };
    let x0 = project_box(&warm.x, &bounds);
    let warm_time = warm_clock.elapsed().as_secs_f64();

    let problem = match Problem::new(&objective, bounds) {
        Ok(p) => p,
        Err(e) => return fail_all(e.to_string()),
    };
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for &method in &cfg.methods {
        let clock = Instant::now();
        let outcome = solve(method, &problem, &cfg.solver, &cfg.options, &x0);
        let runtime = warm_time + clock.elapsed().as_secs_f64();
        match outcome {
            Ok(res) => {
                let relerr = relative_error(&res.x, &x_true).ok();
                runs.push(RunRecord {
                    method,
                    n,
                    s,
                    replicate,
                    status: res.status,
                    iterations: res.iterations,
                    warm_iterations: warm.iterations,
                    runtime,
                    relerr,
                    l0: l0_norm(&res.x),
                    ncf: res.trace.ncf_total(),
                    ncgf: res.trace.ncgf_total(),
                    warm_ncgf: warm.ncgf,
                    restarts: res.trace.restarts(),
                    accuracy: None,
                    result: cfg.keep_results.then_some(res),
                });
            }
            Err(e) => failures.push(CellFailure {
                method: Some(method),
                n,
                s,
                replicate,
                message: e.to_string(),
            }),
        }
    }
    (runs, failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_invariants() {
        let inst = gen_cs_instance(8, 10, 3, 0.1, 1).unwrap();
        assert_eq!(l0_norm(&inst.x_true), 3);
        assert!(inst.x_true.iter().all(|&v| v == 0.0 || v == 1.0 || v == -1.0));
        for col in inst.a.axis_iter(Axis(1)) {
            assert!((col.dot(&col).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_rhs_is_exact() {
        let inst = gen_cs_instance(6, 9, 2, 0.0, 5).unwrap();
        assert_eq!(inst.b, mat_vec(&inst.a, &inst.x_true));
    }

    #[test]
    fn same_seed_same_instance() {
        let a = gen_cs_instance(5, 7, 2, 0.2, 11).unwrap();
        let b = gen_cs_instance(5, 7, 2, 0.2, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.a, gen_cs_instance(5, 7, 2, 0.2, 12).unwrap().a);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(
            gen_cs_instance(5, 4, 5, 0.0, 0),
            Err(BenchError::SparsityExceedsDimension { s: 5, n: 4 })
        );
        assert!(gen_cs_instance(0, 4, 1, 0.0, 0).is_err());
    }

    #[test]
    fn noise_reading() {
        let mut cfg = CsSuiteConfig::desk();
        assert!((cfg.noise_sigma() - 0.05f64.sqrt()).abs() < 1e-15);
        cfg.noise_as_std = true;
        assert_eq!(cfg.noise_sigma(), 0.05);
    }

    #[test]
    fn zero_replicates_rejected() {
        let cfg = CsSuiteConfig {
            replicates: 0,
            ..CsSuiteConfig::desk()
        };
        assert!(matches!(cfg.validate(), Err(BenchError::InvalidConfig(_))));
    }

    #[test]
    fn tiny_suite_runs() {
        let cfg = CsSuiteConfig {
            m: 40,
            sizes: vec![(80, 2)],
            replicates: 2,
            ..CsSuiteConfig::desk()
        };
        let out = run_cs_suite(&cfg).unwrap();
        assert!(out.all_succeeded());
        assert_eq!(out.runs.len(), 12);
        assert_eq!(out.report.rows.len(), 6);
    }
}
