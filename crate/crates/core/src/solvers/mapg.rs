use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::{Method, Problem, SolverConfig, SolverError, SolverResult, Tracker};
use crate::linalg::dist2;

/// `q_{k+1} = η q_k + 1`
pub fn q_update(eta: f64, q: f64) -> f64 {
    eta * q + 1.0
}

/// `t_{k+1} = (√(1 + 4t_k²) + 1) / 2`
pub fn t_update(t: f64) -> f64 {
    ((1.0 + 4.0 * t * t).sqrt() + 1.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapgParams {
    pub alpha_x: f64,
    pub alpha_y: f64,
}

impl MapgParams {
    /// `α_x = α_y = 1/(L + 1e−6)`.
    pub fn defaults(lipschitz: f64) -> Self {
        let a = 1.0 / (lipschitz + 1e-6);
        Self { alpha_x: a, alpha_y: a }
    }

    fn validate(&self) -> Result<(), SolverError> {
        if !(self.alpha_x > 0.0 && self.alpha_y > 0.0 && self.alpha_x.is_finite() && self.alpha_y.is_finite()) {
            return Err(SolverError::InvalidConfig("mAPG step sizes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmapgParams {
    pub alpha_x: f64,
    pub alpha_y: f64,
    /// Averaging weight of the reference value, in `[0, 1)`.
    pub eta: f64,
    /// Sufficient-decrease slack, positive.
    pub delta: f64,
}

impl NmapgParams {
    pub fn defaults(lipschitz: f64) -> Self {
        let MapgParams { alpha_x, alpha_y } = MapgParams::defaults(lipschitz);
        Self {
            alpha_x,
            alpha_y,
            eta: 0.8,
            delta: 1e-5,
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        MapgParams {
            alpha_x: self.alpha_x,
            alpha_y: self.alpha_y,
        }
        .validate()?;
        if !(0.0..1.0).contains(&self.eta) {
            return Err(SolverError::InvalidConfig(format!("nmAPG eta must lie in [0, 1), got {}", self.eta)));
        }
        if !(self.delta > 0.0) {
            return Err(SolverError::InvalidConfig(format!("nmAPG delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }
}

/// Momentum point `y^k = x^k + (t_{k−1}/t_k)(z^k − x^k) + ((t_{k−1} − 1)/t_k)(x^k − x^{k−1})`.
fn momentum_point(x: &Array1<f64>, x_prev: &Array1<f64>, z: &Array1<f64>, t_prev: f64, t: f64) -> Array1<f64> {
    let mut y = x.clone();
    y.scaled_add(t_prev / t, &(z - x));
    y.scaled_add((t_prev - 1.0) / t, &(x - x_prev));
    y
}

/// Forward-backward step `prox_{α g}(p − α∇f(p))` with `g = λ‖·‖₀ + δ_X`.
fn prox_step(problem: &Problem<'_>, cfg: &SolverConfig, p: &Array1<f64>, grad: &Array1<f64>, alpha: f64) -> Array1<f64> {
    let mut c = p.clone();
    c.scaled_add(-alpha, grad);
    problem.prox(&c, cfg.lambda * alpha, cfg.tie_rule)
}

/// Monotone accelerated proximal gradient.
///
/// Starts from `t_0 = 0`, `t_1 = 1`, `z^1 = x^1 = x^0`. Each iteration proxes
/// from the momentum point (`z^{k+1}`) and from `x^k` (`v^{k+1}`) and keeps the
/// one with smaller `H`. The trace's `restarted` flag marks iterations that
/// kept `v^{k+1}`.
pub fn mapg(
    problem: &Problem<'_>,
    cfg: &SolverConfig,
    params: &MapgParams,
    x0: &Array1<f64>,
) -> Result<SolverResult, SolverError> {
    params.validate()?;
    let mut tracker = Tracker::start(Method::Mapg, problem, cfg, x0)?;

    let (mut t_prev, mut t) = (0.0, 1.0);
    let mut x_prev = x0.clone();
    let mut x = x0.clone();
    let mut z = x0.clone();
    for _ in 0..cfg.max_iter {
        let y = momentum_point(&x, &x_prev, &z, t_prev, t);
        let gy = tracker.gradient(&y);
        let z_new = prox_step(problem, cfg, &y, &gy, params.alpha_y);
        let gx = tracker.gradient(&x);
        let v_new = prox_step(problem, cfg, &x, &gx, params.alpha_x);
        let h_z = tracker.composite(&z_new);
        let h_v = tracker.composite(&v_new);
        let (x_new, h_new, fallback) = if h_z <= h_v {
            (z_new.clone(), h_z, false)
        } else {
            (v_new, h_v, true)
        };

        let stop = tracker.record(&x_new, &x, &y, fallback, Some(h_new))?;
        x_prev = std::mem::replace(&mut x, x_new);
        z = z_new;
        t_prev = t;
        t = t_update(t);
        if stop {
            return Ok(tracker.finish(x, true));
        }
    }
    Ok(tracker.finish(x, false))
}

/// Non-monotone accelerated proximal gradient.
///
/// Accepts `z^{k+1}` outright when `H(z^{k+1}) <= c_k − δ‖z^{k+1} − y^k‖²`,
/// otherwise falls back to the mAPG comparison. The reference value is
/// `c_{k+1} = (η q_k c_k + H(x^{k+1})) / q_{k+1}` with `q_{k+1} = η q_k + 1`,
/// `q_1 = 1`, `c_1 = H(x^1)`.
pub fn nmapg(
    problem: &Problem<'_>,
    cfg: &SolverConfig,
    params: &NmapgParams,
    x0: &Array1<f64>,
) -> Result<SolverResult, SolverError> {
    params.validate()?;
    let mut tracker = Tracker::start(Method::Nmapg, problem, cfg, x0)?;

    let (mut t_prev, mut t) = (0.0, 1.0);
    let mut x_prev = x0.clone();
    let mut x = x0.clone();
    let mut z = x0.clone();
    let mut q = 1.0;
    let mut c = tracker.composite(x0);
    for _ in 0..cfg.max_iter {
        let y = momentum_point(&x, &x_prev, &z, t_prev, t);
        let gy = tracker.gradient(&y);
        let z_new = prox_step(problem, cfg, &y, &gy, params.alpha_y);
        let h_z = tracker.composite(&z_new);
        let gap = dist2(&z_new, &y);

        let (x_new, h_new, fallback) = if h_z <= c - params.delta * gap * gap {
            (z_new.clone(), h_z, false)
        } else {
            let gx = tracker.gradient(&x);
            let v_new = prox_step(problem, cfg, &x, &gx, params.alpha_x);
            let h_v = tracker.composite(&v_new);
            if h_z <= h_v {
                (z_new.clone(), h_z, true)
            } else {
                (v_new, h_v, true)
            }
        };

        let q_next = q_update(params.eta, q);
        c = (params.eta * q * c + h_new) / q_next;
        q = q_next;

        let stop = tracker.record(&x_new, &x, &y, fallback, Some(h_new))?;
        x_prev = std::mem::replace(&mut x, x_new);
        z = z_new;
        t_prev = t;
        t = t_update(t);
        if stop {
            return Ok(tracker.finish(x, true));
        }
    }
    Ok(tracker.finish(x, false))
}
