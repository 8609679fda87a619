use ndarray::Array1;

use super::{stop_check, t_update, SolverError, StopRule};
use crate::linalg::gradient_step;
use crate::objectives::SmoothObjective;
use crate::prox::{soft_threshold, soft_threshold_masked};

/// Warm-start output of [`fista_l1`].
#[derive(Debug, Clone)]
pub struct FistaOutcome {
    pub x: Array1<f64>,
    pub iterations: usize,
    pub ncgf: usize,
    pub converged: bool,
}

/// FISTA on `f(x) + λ₁‖x‖₁` with step `1/L`.
///
/// `penalized`, when given, restricts the ℓ1 term to the marked coordinates.
pub fn fista_l1(
    objective: &dyn SmoothObjective,
    lam1: f64,
    x0: &Array1<f64>,
    stop: StopRule,
    max_iter: usize,
    penalized: Option<&[bool]>,
) -> Result<FistaOutcome, SolverError> {
    if !(lam1 > 0.0 && lam1.is_finite()) {
        return Err(SolverError::InvalidConfig(format!("l1 weight must be positive, got {lam1}")));
    }
    if x0.len() != objective.dim() {
        return Err(SolverError::DimensionMismatch {
            expected: objective.dim(),
            found: x0.len(),
        });
    }
    let l = objective.lipschitz();
    if !(l > 0.0 && l.is_finite()) {
        return Err(SolverError::DegenerateLipschitz(l));
    }
    let shrink = lam1 / l;

    let mut x = x0.clone();
    let mut y = x0.clone();
    let mut t = 1.0;
    for it in 1..=max_iter {
        let g = objective.gradient(&y);
        let c = gradient_step(&y, &g, l);
        let x_new = match penalized {
            None => soft_threshold(&c, shrink),
            Some(mask) => soft_threshold_masked(&c, shrink, mask),
        };
        if x_new.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFiniteObjective { iteration: it });
        }
        let t_next = t_update(t);
        y = &x_new + &((&x_new - &x) * ((t - 1.0) / t_next));
        let done = stop_check(stop, &x_new, &x);
        x = x_new;
        t = t_next;
        if done {
            return Ok(FistaOutcome { x, iterations: it, ncgf: it, converged: true });
        }
    }
    Ok(FistaOutcome { x, iterations: max_iter, ncgf: max_iter, converged: false })
}
