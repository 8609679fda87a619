use ndarray::Array1;

use super::{Method, Problem, SolverConfig, SolverError, SolverResult, Tracker};
use crate::linalg::gradient_step;

/// Extrapolated PIHT: full-vector extrapolation `y = x^k + ω(x^k − x^{k−1})`,
/// reset to `x^k` when `H(y) > H(x^k)`, then the PIHT step taken at `y`.
///
/// The optional strongly convex term of the original model is fixed to zero.
pub fn epiht(problem: &Problem<'_>, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverResult, SolverError> {
    let mut tracker = Tracker::start(Method::Epiht, problem, cfg, x0)?;
    let step_inv = problem.lipschitz() + cfg.mu;
    let lam_eff = cfg.lambda / step_inv;

    let mut x_prev = x0.clone();
    let mut x = x0.clone();
    for _ in 0..cfg.max_iter {
        let mut y = &x + &((&x - &x_prev) * cfg.omega);
        let h_y = tracker.composite(&y);
        let h_x = tracker.composite(&x);
        let restarted = h_y > h_x;
        if restarted {
            y = x.clone();
        }
        let g = tracker.gradient(&y);
        let x_new = problem.prox(&gradient_step(&y, &g, step_inv), lam_eff, cfg.tie_rule);
        let stop = tracker.record(&x_new, &x, &y, restarted, None)?;
        x_prev = std::mem::replace(&mut x, x_new);
        if stop {
            return Ok(tracker.finish(x, true));
        }
    }
    Ok(tracker.finish(x, false))
}
