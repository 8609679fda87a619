use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::RunRecord;
use crate::solvers::Method;

/// Aggregates over the replicates of one `(method, n, s)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: Method,
    pub n: usize,
    pub s: usize,
    /// Warm-start iterations included.
    pub iters_mean: f64,
    pub iters_std: f64,
    pub time_mean: f64,
    pub time_std: f64,
    /// `None` when there is no ground truth.
    pub relerr_mean: Option<f64>,
    pub relerr_std: Option<f64>,
    pub l0_mean: f64,
    pub ncf_total_mean: f64,
    pub ncgf_total_mean: f64,
    /// Restarted iterations over all iterations of the ℓ0 method.
    pub restart_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_mean: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

/// Mean and sample standard deviation (`n − 1` denominator, 0 for a single value).
pub fn sample_mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

impl ExperimentReport {
    /// Group runs by `(method, n, s)`; replicates are reduced in index order.
    pub fn aggregate(runs: &[RunRecord]) -> Self {
        let mut cells: BTreeMap<(Method, usize, usize), Vec<&RunRecord>> = BTreeMap::new();
        for r in runs {
            cells.entry((r.method, r.n, r.s)).or_default().push(r);
        }
        let rows = cells
            .into_iter()
            .map(|((method, n, s), mut group)| {
                group.sort_by_key(|r| r.replicate);
                let iters: Vec<f64> = group.iter().map(|r| r.total_iterations() as f64).collect();
                let times: Vec<f64> = group.iter().map(|r| r.runtime).collect();
                let (iters_mean, iters_std) = sample_mean_std(&iters);
                let (time_mean, time_std) = sample_mean_std(&times);
                let relerrs: Option<Vec<f64>> = group.iter().map(|r| r.relerr).collect();
                let (relerr_mean, relerr_std) = match relerrs {
                    Some(v) => {
                        let (m, sd) = sample_mean_std(&v);
                        (Some(m), Some(sd))
                    }
                    None => (None, None),
                };
                let accs: Option<Vec<f64>> = group.iter().map(|r| r.accuracy).collect();
                let restarts: usize = group.iter().map(|r| r.restarts).sum();
                let solver_iters: usize = group.iter().map(|r| r.iterations).sum();
                ReportRow {
                    method,
                    n,
                    s,
                    iters_mean,
                    iters_std,
                    time_mean,
                    time_std,
                    relerr_mean,
                    relerr_std,
                    l0_mean: mean(group.iter().map(|r| r.l0 as f64)),
                    ncf_total_mean: mean(group.iter().map(|r| r.ncf as f64)),
                    ncgf_total_mean: mean(group.iter().map(|r| r.ncgf as f64)),
                    restart_rate: if solver_iters == 0 {
                        0.0
                    } else {
                        restarts as f64 / solver_iters as f64
                    },
                    accuracy_mean: accs.map(|v| sample_mean_std(&v).0),
                }
            })
            .collect();
        Self { rows }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, method: Method, n: usize, s: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.method == method && r.n == n && r.s == s)
    }

    /// Copy with the wall-clock columns zeroed.
    pub fn without_timing(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| ReportRow {
                time_mean: 0.0,
                time_std: 0.0,
                ..r.clone()
            })
            .collect();
        Self { rows }
    }

    /// Rows in `(method, n, s)` order.
    pub fn sort(&mut self) {
        self.rows.sort_by_key(|r| (r.method, r.n, r.s));
    }
}
