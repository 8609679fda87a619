//! Per-iteration records and the runtime checks built on them.
//!
//! The checks mirror the convergence guarantees of the accelerated method:
//! monotone objective, bounded sum of squared extrapolation gaps, support
//! that settles, a floor on nonzero magnitudes, and a sampled certificate that
//! a limit point is a local minimizer of `H`.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::prox::project_box;
use crate::solvers::Problem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub k: usize,
    /// `H(x^k)`
    pub objective: f64,
    /// Indices of the nonzero coordinates of `x^k`.
    pub support: Vec<usize>,
    /// `‖x^k − x^{k−1}‖`
    pub step_norm: f64,
    /// `‖x^k − y^k‖`, `y^k` being the method's extrapolated point.
    pub gap_norm: f64,
    pub restarted: bool,
    /// Cumulative objective evaluations after iteration `k`.
    pub ncf: usize,
    /// Cumulative gradient evaluations after iteration `k`.
    pub ncgf: usize,
    /// Smallest `|x^k_i|` over nonzero penalized coordinates (`∞` if none).
    pub min_nonzero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateTrace {
    /// `H(x^0)`
    pub initial_objective: f64,
    records: Vec<IterRecord>,
}

/// First violation of monotone descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ascent {
    pub k: usize,
    pub previous: f64,
    pub current: f64,
}

impl IterateTrace {
    pub fn new(initial_objective: f64) -> Self {
        Self {
            initial_objective,
            records: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, record: IterRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[IterRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&IterRecord> {
        self.records.last()
    }

    pub fn ncf_total(&self) -> usize {
        self.last().map_or(0, |r| r.ncf)
    }

    pub fn ncgf_total(&self) -> usize {
        self.last().map_or(0, |r| r.ncgf)
    }

    pub fn restarts(&self) -> usize {
        self.records.iter().filter(|r| r.restarted).count()
    }

    /// Objective values `H(x^0), H(x^1), …`.
    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.initial_objective).chain(self.records.iter().map(|r| r.objective))
    }

    /// First `k` with `H(x^k) > H(x^{k−1}) + tol`.
    pub fn first_ascent(&self, tol: f64) -> Option<Ascent> {
        let mut previous = self.initial_objective;
        for r in &self.records {
            if r.objective > previous + tol {
                return Some(Ascent {
                    k: r.k,
                    previous,
                    current: r.objective,
                });
            }
            previous = r.objective;
        }
        None
    }

    /// Whether the support is identical across the final `fraction` of
    /// iterations (at least one iteration).
    pub fn support_stable_tail(&self, fraction: f64) -> bool {
        let n = self.records.len();
        if n == 0 {
            return true;
        }
        let tail = ((fraction * n as f64).ceil() as usize).clamp(1, n);
        let window = &self.records[n - tail..];
        window.iter().all(|r| r.support == window[0].support)
    }

    /// Smallest nonzero penalized magnitude over all iterates.
    pub fn min_nonzero_magnitude(&self) -> f64 {
        self.records.iter().map(|r| r.min_nonzero).fold(f64::INFINITY, f64::min)
    }

    /// `Σ_k ‖x^k − y^k‖²`
    pub fn gap_square_sum(&self) -> f64 {
        self.records.iter().map(|r| r.gap_norm * r.gap_norm).sum()
    }

    /// `2 (H(x^0) − min_k H(x^k)) / μ`, the bound the gap sum obeys for the
    /// accelerated method.
    pub fn gap_sum_bound(&self, mu: f64) -> f64 {
        let min_h = self.objectives().fold(f64::INFINITY, f64::min);
        2.0 * (self.initial_objective - min_h) / mu
    }
}

/// Outcome of [`certify_local_minimizer`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinCertificate {
    /// `max_{i ∉ I(x)} |x_i − clamp_i(x_i − ∇f(x)_i / (L + μ))|`
    pub stationarity: f64,
    /// Most negative `H(x + Δ) − H(x)` seen over the draws (0 if none decreased).
    pub worst_change: f64,
    /// The perturbation attaining `worst_change`, when negative.
    pub worst_delta: Option<Array1<f64>>,
    pub draws: usize,
}

impl LocalMinCertificate {
    pub fn holds(&self, stationarity_tol: f64, slack: f64) -> bool {
        self.stationarity <= stationarity_tol && self.worst_change >= -slack
    }
}

/// Sample the neighbourhood `U` of `x` on which `H` cannot decrease at a
/// limit point:
///
/// * on the support, `|Δ_i| < |x_i|`;
/// * off the support, `‖Δ‖_∞ < min_{i ∈ I(x)} λ / |∇f(x)_i|`;
/// * `x + Δ` stays in the box.
///
/// Draws mix support-only, off-support-only and joint perturbations over
/// scales spanning six decades, so both the first-order and ℓ0 terms get
/// probed.
pub fn certify_local_minimizer(
    problem: &Problem<'_>,
    lambda: f64,
    mu: f64,
    x: &Array1<f64>,
    draws: usize,
    seed: u64,
) -> LocalMinCertificate {
    let n = problem.dim();
    let grad = problem.objective().gradient(x);
    let step = problem.lipschitz() + mu;
    let bounds = problem.bounds();

    let mut stationarity: f64 = 0.0;
    let mut support = Vec::new();
    let mut zeros = Vec::new();
    for i in 0..n {
        let penalized = problem.is_penalized(i);
        if x[i] != 0.0 || !penalized {
            let projected = bounds.clamp_coord(i, x[i] - grad[i] / step);
            stationarity = stationarity.max((x[i] - projected).abs());
            if x[i] != 0.0 {
                support.push(i);
            }
        } else {
            zeros.push(i);
        }
    }
    let off_radius = zeros
        .iter()
        .map(|&i| lambda / grad[i].abs())
        .fold(f64::INFINITY, f64::min)
        .min(1.0);

    let h0 = problem.objective_h(x, lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_change: f64 = 0.0;
    let mut worst_delta = None;
    for _ in 0..draws {
        let scale = 10f64.powf(-rng.random_range(0.0..6.0));
        let mode = rng.random_range(0..3u8);
        let mut candidate = x.clone();
        if mode != 1 {
            for &i in &support {
                candidate[i] += rng.random_range(-1.0..1.0) * x[i].abs() * scale;
            }
        }
        if mode != 0 && !zeros.is_empty() {
            let picks = rng.random_range(1..=zeros.len().min(3));
            for _ in 0..picks {
                let i = zeros[rng.random_range(0..zeros.len())];
                candidate[i] = rng.random_range(-1.0..1.0) * off_radius * scale;
            }
        }
        let candidate = project_box(&candidate, bounds);
        let change = problem.objective_h(&candidate, lambda) - h0;
        if change < worst_change {
            worst_change = change;
            worst_delta = Some(&candidate - x);
        }
    }
    LocalMinCertificate {
        stationarity,
        worst_change,
        worst_delta,
        draws,
    }
}
