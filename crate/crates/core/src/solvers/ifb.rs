use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::{Method, Problem, SolverConfig, SolverError, SolverResult, Tracker};

/// Step size `α` and inertia `β` of the inertial forward-backward method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfbParams {
    pub alpha: f64,
    pub beta: f64,
}

impl IfbParams {
    /// `β = 1e−6`, `α = (0.999999 − 2β)/L`.
    pub fn defaults(lipschitz: f64) -> Self {
        Self::with_beta(lipschitz, 1e-6)
    }

    pub fn with_beta(lipschitz: f64, beta: f64) -> Self {
        Self {
            alpha: (0.999_999 - 2.0 * beta) / lipschitz,
            beta,
        }
    }

    /// Constant parameters must satisfy `α > 0`, `β >= 0` and `αL + 2β < 1`.
    pub fn validate(&self, lipschitz: f64) -> Result<(), SolverError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("IFB alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("IFB beta must be nonnegative, got {}", self.beta)));
        }
        let bound = self.alpha * lipschitz + 2.0 * self.beta;
        if bound >= 1.0 {
            return Err(SolverError::InvalidConfig(format!(
                "IFB parameters violate alpha*L + 2*beta < 1 (got {bound})"
            )));
        }
        Ok(())
    }
}

/// Inertial forward-backward with the Euclidean distance.
///
/// `x^{k+1}` minimizes
/// `λ‖x‖₀ + (1/4α)‖x − x^k + 2α∇f(x^k)‖² + (1/4α)‖x − y^{k+1}‖²` over the box,
/// with `y^{k+1} = x^k + 2β(x^k − x^{k−1})`. The two quadratics sum to
/// `(1/2α)‖x − m‖²` plus a constant, `m = x^k + β(x^k − x^{k−1}) − α∇f(x^k)`
/// being their midpoint, so the step is the ℓ0 prox with weight `λα` at `m`.
pub fn ifb(
    problem: &Problem<'_>,
    cfg: &SolverConfig,
    params: &IfbParams,
    x0: &Array1<f64>,
) -> Result<SolverResult, SolverError> {
    params.validate(problem.lipschitz())?;
    let mut tracker = Tracker::start(Method::Ifb, problem, cfg, x0)?;
    let lam_eff = cfg.lambda * params.alpha;

    let mut x_prev = x0.clone();
    let mut x = x0.clone();
    for _ in 0..cfg.max_iter {
        let g = tracker.gradient(&x);
        let inertia = &x - &x_prev;
        let y = &x + &(&inertia * (2.0 * params.beta));
        let mut mid = x.clone();
        mid.scaled_add(params.beta, &inertia);
        mid.scaled_add(-params.alpha, &g);
        let x_new = problem.prox(&mid, lam_eff, cfg.tie_rule);
        let stop = tracker.record(&x_new, &x, &y, false, None)?;
        x_prev = std::mem::replace(&mut x, x_new);
        if stop {
            return Ok(tracker.finish(x, true));
        }
    }
    Ok(tracker.finish(x, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_satisfy_constraint() {
        let p = IfbParams::defaults(3.0);
        assert!(p.validate(3.0).is_ok());
        assert!((p.alpha * 3.0 + 2.0 * p.beta - 0.999_999).abs() < 1e-15);
    }

    #[test]
    fn constraint_violation_rejected() {
        let p = IfbParams { alpha: 0.9, beta: 0.05 };
        assert!(matches!(p.validate(1.0), Err(SolverError::InvalidConfig(_))));
        let p = IfbParams { alpha: 1.0, beta: 0.0 };
        assert!(p.validate(1.0).is_err());
    }
}
