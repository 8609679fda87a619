//! Solvers for `min_x λ‖x‖₀ + f(x)` over a box.
//!
//! All methods share [`Problem`], [`SolverConfig`], the stopping rules and the
//! [`IterateTrace`] bookkeeping. Objective and gradient evaluations made by the
//! algorithm itself are counted; the per-iteration `H(x^k)` written to the
//! trace is diagnostic and is not.

mod apiht;
mod epiht;
mod fista;
mod ifb;
mod mapg;
mod piht;

pub use apiht::{apiht, ApihtOptions, ExtrapolationSet, OmegaSchedule};
pub use epiht::epiht;
pub use fista::{fista_l1, FistaOutcome};
pub use ifb::{ifb, IfbParams};
pub use mapg::{mapg, nmapg, q_update, t_update, MapgParams, NmapgParams};
pub use piht::piht;

use std::fmt;
use std::str::FromStr;

use ndarray::Array1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dist2, dist_inf, norm2};
use crate::objectives::{ObjectiveError, SmoothObjective};
use crate::prox::{prox_l0_box, prox_l0_box_masked, BoxConstraint, TieRule};
use crate::trace::{IterRecord, IterateTrace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("starting point lies outside the box")]
    InfeasibleStart,
    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },
    #[error("gradient Lipschitz constant must be positive and finite, got {0}")]
    DegenerateLipschitz(f64),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// `‖x_new − x_old‖ / max(1, ‖x_new‖) < tol`
    RelChange(f64),
    /// `‖x_new − x_old‖_∞ < tol`
    InfNorm(f64),
}

impl StopRule {
    pub fn tol(&self) -> f64 {
        match *self {
            StopRule::RelChange(t) | StopRule::InfNorm(t) => t,
        }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        match self {
            StopRule::RelChange(_) => StopRule::RelChange(tol),
            StopRule::InfNorm(_) => StopRule::InfNorm(tol),
        }
    }
}

pub fn stop_check(rule: StopRule, x_new: &Array1<f64>, x_old: &Array1<f64>) -> bool {
    assert_eq!(x_new.len(), x_old.len(), "dimension mismatch");
    match rule {
        StopRule::RelChange(tol) => dist2(x_new, x_old) / norm2(x_new).max(1.0) < tol,
        StopRule::InfNorm(tol) => dist_inf(x_new, x_old) < tol,
    }
}

/// Parameters shared by every ℓ0 method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Weight of the ℓ0 term.
    pub lambda: f64,
    /// Proximal term weight; steps are `1 / (L + mu)`.
    pub mu: f64,
    /// Extrapolation weight, strictly inside (0, 1).
    pub omega: f64,
    pub max_iter: usize,
    pub stop: StopRule,
    pub tie_rule: TieRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 0.3,
            mu: 1e-6,
            omega: 0.99,
            max_iter: 10_000,
            stop: StopRule::RelChange(1e-5),
            tie_rule: TieRule::Zero,
        }
    }
}

impl SolverConfig {
    /// Settings of the sparse logistic regression protocol.
    pub fn logistic() -> Self {
        Self {
            lambda: 5e-5,
            stop: StopRule::InfNorm(5e-4),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::InvalidConfig(msg));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return bad(format!("omega must lie in (0, 1), got {}", self.omega));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        let tol = self.stop.tol();
        if !(tol > 0.0 && tol.is_finite()) {
            return bad(format!("stopping tolerance must be positive, got {tol}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "PIHT")]
    Piht,
    #[serde(rename = "IFB")]
    Ifb,
    #[serde(rename = "mAPG")]
    Mapg,
    #[serde(rename = "nmAPG")]
    Nmapg,
    #[serde(rename = "EPIHT")]
    Epiht,
    #[serde(rename = "APIHT")]
    Apiht,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Piht,
        Method::Ifb,
        Method::Mapg,
        Method::Nmapg,
        Method::Epiht,
        Method::Apiht,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Piht => "PIHT",
            Method::Ifb => "IFB",
            Method::Mapg => "mAPG",
            Method::Nmapg => "nmAPG",
            Method::Epiht => "EPIHT",
            Method::Apiht => "APIHT",
        }
    }

    /// Methods whose objective sequence is non-increasing by construction.
    pub fn is_monotone(self) -> bool {
        matches!(self, Method::Piht | Method::Apiht | Method::Epiht | Method::Mapg)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method '{0}' (expected one of piht, ifb, mapg, nmapg, epiht, apiht)")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "piht" => Ok(Method::Piht),
            "ifb" => Ok(Method::Ifb),
            "mapg" => Ok(Method::Mapg),
            "nmapg" => Ok(Method::Nmapg),
            "epiht" => Ok(Method::Epiht),
            "apiht" => Ok(Method::Apiht),
            _ => Err(UnknownMethod(s.to_string())),
        }
    }
}

/// Method-specific knobs that are not derived from `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodOptions {
    pub ifb_beta: f64,
    pub nmapg_eta: f64,
    pub nmapg_delta: f64,
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self {
            ifb_beta: 1e-6,
            nmapg_eta: 0.8,
            nmapg_delta: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIter,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverResult {
    pub method: Method,
    pub x: Array1<f64>,
    pub status: Status,
    pub iterations: usize,
    pub trace: IterateTrace,
}

impl SolverResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

/// `f` over a box, with an optional mask of the coordinates the ℓ0 term sees.
#[derive(Clone)]
pub struct Problem<'a> {
    objective: &'a dyn SmoothObjective,
    bounds: BoxConstraint,
    penalized: Option<Vec<bool>>,
    lipschitz: f64,
}

impl fmt::Debug for Problem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("dim", &self.dim())
            .field("lipschitz", &self.lipschitz)
            .field("masked", &self.penalized.is_some())
            .finish()
    }
}

impl<'a> Problem<'a> {
    pub fn new(objective: &'a dyn SmoothObjective, bounds: BoxConstraint) -> Result<Self, SolverError> {
        if bounds.dim() != objective.dim() {
            return Err(SolverError::DimensionMismatch {
                expected: objective.dim(),
                found: bounds.dim(),
            });
        }
        let lipschitz = objective.lipschitz();
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(SolverError::DegenerateLipschitz(lipschitz));
        }
        Ok(Self {
            objective,
            bounds,
            penalized: None,
            lipschitz,
        })
    }

    pub fn with_penalty_mask(mut self, mask: Vec<bool>) -> Result<Self, SolverError> {
        if mask.len() != self.dim() {
            return Err(SolverError::DimensionMismatch {
                expected: self.dim(),
                found: mask.len(),
            });
        }
        self.penalized = Some(mask);
        Ok(self)
    }

    pub fn objective(&self) -> &'a dyn SmoothObjective {
        self.objective
    }

    pub fn bounds(&self) -> &BoxConstraint {
        &self.bounds
    }

    pub fn penalty_mask(&self) -> Option<&[bool]> {
        self.penalized.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn is_penalized(&self, i: usize) -> bool {
        self.penalized.as_ref().is_none_or(|m| m[i])
    }

    /// Number of nonzero penalized coordinates.
    pub fn l0_count(&self, x: &Array1<f64>) -> usize {
        x.iter()
            .enumerate()
            .filter(|&(i, &v)| v != 0.0 && self.is_penalized(i))
            .count()
    }

    /// `f_value + λ‖x‖₀ + δ_X(x)`.
    pub fn composite(&self, f_value: f64, x: &Array1<f64>, lambda: f64) -> f64 {
        if !self.bounds.contains(x) {
            return f64::INFINITY;
        }
        f_value + lambda * self.l0_count(x) as f64
    }

    /// `H(x) = f(x) + λ‖x‖₀ + δ_X(x)`.
    pub fn objective_h(&self, x: &Array1<f64>, lambda: f64) -> f64 {
        if !self.bounds.contains(x) {
            return f64::INFINITY;
        }
        self.composite(self.objective.value(x), x, lambda)
    }

    /// `argmin_{z ∈ X} lam_eff‖z‖₀ + ½‖z − c‖²` (masked coordinates only projected).
    pub fn prox(&self, c: &Array1<f64>, lam_eff: f64, tie_rule: TieRule) -> Array1<f64> {
        match &self.penalized {
            None => prox_l0_box(c, lam_eff, &self.bounds, tie_rule),
            Some(mask) => prox_l0_box_masked(c, lam_eff, &self.bounds, tie_rule, mask),
        }
    }

    /// Lower bound on `|x_i|` for nonzero penalized coordinates of any prox
    /// output with effective weight `lam_eff`.
    pub fn magnitude_floor(&self, lam_eff: f64) -> f64 {
        let gamma = (2.0 * lam_eff).sqrt();
        let (lo, hi) = (self.bounds.lower(), self.bounds.upper());
        (0..self.dim())
            .filter(|&i| self.is_penalized(i))
            .flat_map(|i| [lo[i].abs(), hi[i].abs()])
            .chain(std::iter::once(gamma))
            .filter(|&v| v != 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Run `method` with its default parameters derived from `L`.
pub fn solve(
    method: Method,
    problem: &Problem<'_>,
    cfg: &SolverConfig,
    opts: &MethodOptions,
    x0: &Array1<f64>,
) -> Result<SolverResult, SolverError> {
    let l = problem.lipschitz();
    match method {
        Method::Piht => piht(problem, cfg, x0),
        Method::Apiht => apiht(problem, cfg, &ApihtOptions::default(), x0),
        Method::Epiht => epiht(problem, cfg, x0),
        Method::Ifb => ifb(problem, cfg, &IfbParams::with_beta(l, opts.ifb_beta), x0),
        Method::Mapg => mapg(problem, cfg, &MapgParams::defaults(l), x0),
        Method::Nmapg => {
            let params = NmapgParams {
                eta: opts.nmapg_eta,
                delta: opts.nmapg_delta,
                ..NmapgParams::defaults(l)
            };
            nmapg(problem, cfg, &params, x0)
        }
    }
}

/// Evaluation counting plus trace bookkeeping for one run.
pub(crate) struct Tracker<'p, 'a> {
    problem: &'p Problem<'a>,
    lambda: f64,
    stop: StopRule,
    method: Method,
    ncf: usize,
    ncgf: usize,
    trace: IterateTrace,
}

impl<'p, 'a> Tracker<'p, 'a> {
    pub(crate) fn start(
        method: Method,
        problem: &'p Problem<'a>,
        cfg: &SolverConfig,
        x0: &Array1<f64>,
    ) -> Result<Self, SolverError> {
        cfg.validate()?;
        if x0.len() != problem.dim() {
            return Err(SolverError::DimensionMismatch {
                expected: problem.dim(),
                found: x0.len(),
            });
        }
        if !problem.bounds().contains(x0) {
            return Err(SolverError::InfeasibleStart);
        }
        let h0 = problem.objective_h(x0, cfg.lambda);
        if !h0.is_finite() {
            return Err(SolverError::NonFiniteObjective { iteration: 0 });
        }
        Ok(Self {
            problem,
            lambda: cfg.lambda,
            stop: cfg.stop,
            method,
            ncf: 0,
            ncgf: 0,
            trace: IterateTrace::new(h0),
        })
    }

    pub(crate) fn value(&mut self, x: &Array1<f64>) -> f64 {
        self.ncf += 1;
        self.problem.objective().value(x)
    }

    pub(crate) fn gradient(&mut self, x: &Array1<f64>) -> Array1<f64> {
        self.ncgf += 1;
        self.problem.objective().gradient(x)
    }

    /// Counted `H(x)`; points outside the box cost nothing and return `+∞`.
    pub(crate) fn composite(&mut self, x: &Array1<f64>) -> f64 {
        if !self.problem.bounds().contains(x) {
            return f64::INFINITY;
        }
        let fx = self.value(x);
        self.problem.composite(fx, x, self.lambda)
    }

    /// Append the record for `x_new`; returns whether the stopping rule fired.
    pub(crate) fn record(
        &mut self,
        x_new: &Array1<f64>,
        x_old: &Array1<f64>,
        center: &Array1<f64>,
        restarted: bool,
        known_h: Option<f64>,
    ) -> Result<bool, SolverError> {
        let k = self.trace.len() + 1;
        let h = known_h.unwrap_or_else(|| self.problem.objective_h(x_new, self.lambda));
        if !h.is_finite() {
            return Err(SolverError::NonFiniteObjective { iteration: k });
        }
        let mut support = Vec::new();
        let mut min_nonzero = f64::INFINITY;
        for (i, &v) in x_new.iter().enumerate() {
            if v != 0.0 {
                support.push(i);
                if self.problem.is_penalized(i) {
                    min_nonzero = min_nonzero.min(v.abs());
                }
            }
        }
        self.trace.push(IterRecord {
            k,
            objective: h,
            support,
            step_norm: dist2(x_new, x_old),
            gap_norm: dist2(x_new, center),
            restarted,
            ncf: self.ncf,
            ncgf: self.ncgf,
            min_nonzero,
        });
        Ok(stop_check(self.stop, x_new, x_old))
    }

    pub(crate) fn finish(self, x: Array1<f64>, converged: bool) -> SolverResult {
        SolverResult {
            method: self.method,
            x,
            status: if converged { Status::Converged } else { Status::MaxIter },
            iterations: self.trace.len(),
            trace: self.trace,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn stop_rule_examples() {
        let x = array![1.0, 2.0];
        assert!(stop_check(StopRule::RelChange(1e-12), &x, &x));
        assert!(stop_check(StopRule::InfNorm(1e-12), &x, &x));

        // ‖x_new‖ = 10, ‖Δ‖ = 0.2
        let new = array![6.0, 8.0];
        let old = array![6.12, 8.16];
        assert!(!stop_check(StopRule::RelChange(1e-5), &new, &old));

        let old = array![1.0004, 1.9996];
        assert!(stop_check(StopRule::InfNorm(5e-4), &x, &old));
        assert!(!stop_check(StopRule::InfNorm(3e-4), &x, &old));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig::logistic().validate().is_ok());
        for bad in [
            SolverConfig { omega: 1.0, ..Default::default() },
            SolverConfig { omega: 0.0, ..Default::default() },
            SolverConfig { mu: 0.0, ..Default::default() },
            SolverConfig { lambda: -1.0, ..Default::default() },
            SolverConfig { max_iter: 0, ..Default::default() },
            SolverConfig { stop: StopRule::InfNorm(0.0), ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(SolverError::InvalidConfig(_))), "{bad:?}");
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }
}
