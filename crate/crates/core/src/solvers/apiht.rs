use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Zip};

use super::{Method, Problem, SolverConfig, SolverError, SolverResult, Tracker};
use crate::linalg::gradient_step;

/// Coordinates that receive the extrapolation displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtrapolationSet {
    /// Nonzero coordinates of `x^k`. Keeps `‖y‖₀ ≤ ‖x^k‖₀`, which the
    /// monotone descent argument relies on.
    #[default]
    Support,
    /// Zero coordinates of `x^k`, as the iteration's case table is literally
    /// typeset. Kept for comparison runs; gives no descent guarantee.
    ZeroSet,
}

/// Per-iteration extrapolation weight `ω_k`.
#[derive(Clone, Default)]
pub enum OmegaSchedule {
    /// `ω_k = cfg.omega` for every `k`.
    #[default]
    Constant,
    /// `ω_k = f(k)`, which must satisfy `0 <= ω_k <= cfg.omega`.
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for OmegaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaSchedule::Constant => f.write_str("Constant"),
            OmegaSchedule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ApihtOptions {
    pub extrapolation: ExtrapolationSet,
    pub omega_schedule: OmegaSchedule,
    /// Take the restart branch every iteration. Diagnostic: the iterates then
    /// coincide with PIHT's.
    pub force_restart: bool,
}

/// Accelerated proximal iterative hard thresholding.
///
/// Per iteration:
/// 1. extrapolate `y = x^k + ω_k (x^k − x^{k−1})` on the coordinates chosen
///    by [`ExtrapolationSet`], copying `x^k` elsewhere;
/// 2. if `y` leaves the box or `⟨y − x^k, ∇f(y)⟩ > 0`, reset `y = x^k` and
///    evaluate `∇f(x^k)` (the second gradient evaluation of that iteration);
/// 3. `x^{k+1}` is the box-constrained ℓ0 prox with weight `λ/(L+μ)` at
///    `y − ∇f(y)/(L+μ)`.
///
/// The box test runs before the gradient at `y` is formed, so an infeasible
/// extrapolation costs one gradient evaluation, not two.
pub fn apiht(
    problem: &Problem<'_>,
    cfg: &SolverConfig,
    opts: &ApihtOptions,
    x0: &Array1<f64>,
) -> Result<SolverResult, SolverError> {
    let mut tracker = Tracker::start(Method::Apiht, problem, cfg, x0)?;
    let step_inv = problem.lipschitz() + cfg.mu;
    let lam_eff = cfg.lambda / step_inv;

    let mut x_prev = x0.clone();
    let mut x = x0.clone();
    for k in 0..cfg.max_iter {
        let omega = match &opts.omega_schedule {
            OmegaSchedule::Constant => cfg.omega,
            OmegaSchedule::Custom(f) => {
                let w = f(k);
                if !(0.0..=cfg.omega).contains(&w) {
                    return Err(SolverError::InvalidConfig(format!(
                        "omega schedule gave {w} at iteration {k}; must lie in [0, {}]",
                        cfg.omega
                    )));
                }
                w
            }
        };
        let y = extrapolate(&x, &x_prev, omega, opts.extrapolation);

        let mut restarted = opts.force_restart || !problem.bounds().contains(&y);
        let mut center = None;
        if !restarted {
            let g = tracker.gradient(&y);
            let ascent: f64 = Zip::from(&y).and(&x).and(&g).fold(0.0, |acc, &yi, &xi, &gi| acc + (yi - xi) * gi);
            if ascent > 0.0 {
                restarted = true;
            } else {
                center = Some((y, g));
            }
        }
        let (y, g) = match center {
            Some(pair) => pair,
            None => {
                let g = tracker.gradient(&x);
                (x.clone(), g)
            }
        };

        let x_new = problem.prox(&gradient_step(&y, &g, step_inv), lam_eff, cfg.tie_rule);
        let stop = tracker.record(&x_new, &x, &y, restarted, None)?;
        x_prev = std::mem::replace(&mut x, x_new);
        if stop {
            return Ok(tracker.finish(x, true));
        }
    }
    Ok(tracker.finish(x, false))
}

fn extrapolate(x: &Array1<f64>, x_prev: &Array1<f64>, omega: f64, set: ExtrapolationSet) -> Array1<f64> {
    Zip::from(x).and(x_prev).map_collect(|&xi, &pi| {
        let on_support = xi != 0.0;
        let extrapolated = match set {
            ExtrapolationSet::Support => on_support,
            ExtrapolationSet::ZeroSet => !on_support,
        };
        if extrapolated {
            xi + omega * (xi - pi)
        } else {
            xi
        }
    })
}
