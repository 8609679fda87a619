use ndarray::Array1;

use super::{Method, Problem, SolverConfig, SolverError, SolverResult, Tracker};
use crate::linalg::gradient_step;

/// Proximal iterative hard thresholding.
///
/// Each step minimizes `λ‖x‖₀ + (L/2)‖x − x^k + ∇f(x^k)/L‖² + (μ/2)‖x − x^k‖²`
/// over the box, i.e. the ℓ0 prox with weight `λ/(L+μ)` at
/// `x^k − ∇f(x^k)/(L+μ)`.
pub fn piht(problem: &Problem<'_>, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverResult, SolverError> {
    let mut tracker = Tracker::start(Method::Piht, problem, cfg, x0)?;
    let step_inv = problem.lipschitz() + cfg.mu;
    let lam_eff = cfg.lambda / step_inv;

    let mut x = x0.clone();
    for _ in 0..cfg.max_iter {
        let g = tracker.gradient(&x);
        let x_new = problem.prox(&gradient_step(&x, &g, step_inv), lam_eff, cfg.tie_rule);
        let stop = tracker.record(&x_new, &x, &x, false, None)?;
        x = x_new;
        if stop {
            return Ok(tracker.finish(x, true));
        }
    }
    Ok(tracker.finish(x, false))
}
