//! Synthetic instances and the benchmark suites built on them.

mod cs;
mod logreg;
mod report;

pub use cs::{gen_cs_instance, run_cs_suite, CsInstance, CsSuiteConfig, DESK_SIZES, FULL_SCALE_SIZES};
pub use logreg::{
    accuracy, gen_synthetic_logreg, run_logreg_suite, LabeledData, LogregDataset, LogregSuiteConfig,
    SyntheticLogregConfig,
};
pub use report::{sample_mean_std, ExperimentReport, ReportRow};

use ndarray::Array1;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{dist2, norm2};
use crate::solvers::{Method, SolverResult, Status};

/// Environment variable holding the worker count for suite runs.
pub const WORKERS_ENV: &str = "SPARSE_L0_WORKERS";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("sparsity {s} exceeds dimension {n}")]
    SparsityExceedsDimension { s: usize, n: usize },
    #[error("instance dimensions must be positive (m={m}, n={n})")]
    EmptyDimension { m: usize, n: usize },
    #[error("reference vector has zero norm")]
    ZeroReference,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid suite configuration: {0}")]
    InvalidConfig(String),
    #[error("could not draw a sample with margin {margin} after {attempts} attempts")]
    MarginUnreachable { margin: f64, attempts: usize },
    #[error("worker pool: {0}")]
    Pool(String),
}

/// `‖x − x_true‖ / ‖x_true‖`
pub fn relative_error(x: &Array1<f64>, x_true: &Array1<f64>) -> Result<f64, BenchError> {
    if x.len() != x_true.len() {
        return Err(BenchError::LengthMismatch(x.len(), x_true.len()));
    }
    let denom = norm2(x_true);
    if denom == 0.0 {
        return Err(BenchError::ZeroReference);
    }
    Ok(dist2(x, x_true) / denom)
}

pub fn l0_norm(x: &Array1<f64>) -> usize {
    x.iter().filter(|v| **v != 0.0).count()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a suite seed with cell coordinates into an independent stream seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(base), |h, &p| splitmix64(h ^ splitmix64(p)))
}

/// Thread pool sized by [`WORKERS_ENV`], defaulting to the available cores.
pub fn worker_pool() -> Result<rayon::ThreadPool, BenchError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => log::warn!("ignoring {WORKERS_ENV}={raw:?}; expected a positive integer"),
        }
    }
    builder.build().map_err(|e| BenchError::Pool(e.to_string()))
}

/// One method on one replicate.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub method: Method,
    pub n: usize,
    pub s: usize,
    pub replicate: usize,
    pub status: Status,
    /// Iterations of the ℓ0 method alone.
    pub iterations: usize,
    pub warm_iterations: usize,
    /// Seconds, warm start included.
    pub runtime: f64,
    pub relerr: Option<f64>,
    pub l0: usize,
    pub ncf: usize,
    pub ncgf: usize,
    pub warm_ncgf: usize,
    pub restarts: usize,
    pub accuracy: Option<f64>,
    #[serde(skip)]
    pub result: Option<SolverResult>,
}

impl RunRecord {
    pub fn total_iterations(&self) -> usize {
        self.iterations + self.warm_iterations
    }

    fn key(&self) -> (Method, usize, usize, usize) {
        (self.method, self.n, self.s, self.replicate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub method: Option<Method>,
    pub n: usize,
    pub s: usize,
    pub replicate: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub report: ExperimentReport,
    /// Sorted by `(method, n, s, replicate)`.
    pub runs: Vec<RunRecord>,
    pub failures: Vec<CellFailure>,
}

impl SuiteOutcome {
    fn assemble(mut runs: Vec<RunRecord>, mut failures: Vec<CellFailure>) -> Self {
        runs.sort_by_key(|r| r.key());
        failures.sort_by(|a, b| {
            (a.n, a.s, a.replicate, a.method).cmp(&(b.n, b.s, b.replicate, b.method))
        });
        Self {
            report: ExperimentReport::aggregate(&runs),
            runs,
            failures,
        }
    }

    pub fn all_succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn relative_error_examples() {
        let t = array![1.0, -1.0, 0.0];
        assert_eq!(relative_error(&t, &t).unwrap(), 0.0);
        assert_eq!(relative_error(&Array1::zeros(3), &t).unwrap(), 1.0);
        assert!((relative_error(&(&t * 2.0), &t).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(relative_error(&t, &Array1::zeros(3)), Err(BenchError::ZeroReference));
    }

    #[test]
    fn l0_counts_exact_zeros() {
        assert_eq!(l0_norm(&array![0.0, -0.0, 1e-300, 2.0]), 2);
    }

    #[test]
    fn seeds_differ_by_part() {
        let a = derive_seed(7, &[2000, 20, 0]);
        assert_eq!(a, derive_seed(7, &[2000, 20, 0]));
        assert_ne!(a, derive_seed(7, &[2000, 20, 1]));
        assert_ne!(a, derive_seed(8, &[2000, 20, 0]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
    }
}
