//! Self-checks run by the `check` subcommand.

use std::fmt;
use std::str::FromStr;

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bench::{gen_cs_instance, gen_synthetic_logreg};
use crate::linalg::dist_inf;
use crate::objectives::{finite_difference_gradient, LeastSquaresObjective, LogisticObjective, SmoothObjective};
use crate::prox::{l0_box_objective_1d, prox_l0_box_1d, BoxConstraint, TieRule};
use crate::solvers::{apiht, piht, ApihtOptions, Problem, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Prox,
    Gradient,
    Descent,
    Restart,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Prox, Suite::Gradient, Suite::Descent, Suite::Restart];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prox => "prox",
            Suite::Gradient => "gradient",
            Suite::Descent => "descent",
            Suite::Restart => "restart",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown suite '{s}' (expected prox, gradient, descent or restart)"))
    }
}

/// Deliberate faults used to confirm the suites detect breakage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the prox tie rule halfway through the prox suite.
    TieRuleFlip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub passed: bool,
    pub cases: usize,
    /// First counterexample, when failed.
    pub detail: Option<String>,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:<9} ({} cases)", self.suite.name(), self.cases)?;
        if let Some(d) = &self.detail {
            write!(f, "\n     counterexample: {d}")?;
        }
        Ok(())
    }
}

pub fn run_checks(suites: &[Suite], fault: Option<Fault>, seed: u64) -> Vec<CheckOutcome> {
    suites
        .iter()
        .map(|&suite| match suite {
            Suite::Prox => prox_suite(fault, seed),
            Suite::Gradient => gradient_suite(seed),
            Suite::Descent => descent_suite(seed),
            Suite::Restart => restart_suite(seed),
        })
        .collect()
}

fn outcome(suite: Suite, cases: usize, detail: Option<String>) -> CheckOutcome {
    CheckOutcome {
        suite,
        passed: detail.is_none(),
        cases,
        detail,
    }
}

/// Smallest objective over the closed-form candidates and a uniform grid.
fn brute_force_min_1d(c: f64, lam: f64, lo: f64, hi: f64) -> f64 {
    let h = |x: f64| l0_box_objective_1d(x, c, lam, lo, hi);
    let mut best = h(c.clamp(lo, hi)).min(h(lo)).min(h(hi));
    if lo <= 0.0 && 0.0 <= hi {
        best = best.min(h(0.0));
    }
    const GRID: usize = 400;
    for i in 0..=GRID {
        best = best.min(h(lo + (hi - lo) * i as f64 / GRID as f64));
    }
    best
}

fn prox_suite(fault: Option<Fault>, seed: u64) -> CheckOutcome {
    const CASES: usize = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tie = TieRule::Zero;
    for i in 0..CASES {
        if i == CASES / 2 && fault == Some(Fault::TieRuleFlip) {
            tie = tie.flipped();
        }
        if i % 10 == 0 {
            // Exact tie: |c| = √(2λ), box wide enough to contain c.
            let c = rng.random_range(1..40) as f64 / 4.0 * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let lam = c * c / 2.0;
            let got = prox_l0_box_1d(c, lam, -20.0, 20.0, tie);
            if got != 0.0 {
                return outcome(
                    Suite::Prox,
                    i + 1,
                    Some(format!("tie c={c}, lambda={lam}, box=[-20, 20]: returned {got}, expected 0")),
                );
            }
            continue;
        }
        let c: f64 = rng.random_range(-5.0..5.0);
        let lam: f64 = rng.random_range(0.01..4.0);
        let (lo, hi) = match rng.random_range(0..3u8) {
            0 => (rng.random_range(-5.0..0.0), rng.random_range(0.0..5.0)),
            1 => (rng.random_range(0.1..2.0), rng.random_range(2.0..5.0)),
            _ => (rng.random_range(-5.0..-2.0), rng.random_range(-2.0..-0.1)),
        };
        let got = prox_l0_box_1d(c, lam, lo, hi, tie);
        let value = l0_box_objective_1d(got, c, lam, lo, hi);
        let best = brute_force_min_1d(c, lam, lo, hi);
        if !(lo..=hi).contains(&got) || value > best + 1e-12 {
            return outcome(
                Suite::Prox,
                i + 1,
                Some(format!(
                    "c={c}, lambda={lam}, box=[{lo}, {hi}]: returned {got} with objective {value}, oracle {best}"
                )),
            );
        }
    }
    outcome(Suite::Prox, CASES, None)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Array1<f64> {
    Array1::from_shape_simple_fn(n, || scale * rng.sample::<f64, _>(StandardNormal))
}

fn small_objectives(seed: u64) -> (LeastSquaresObjective, LogisticObjective) {
    let inst = gen_cs_instance(20, 30, 3, 0.1, seed).expect("valid sizes");
    let ls = LeastSquaresObjective::new(inst.a, inst.b).expect("nonzero matrix");
    let data = gen_synthetic_logreg(40, 8, 3, 0.1, seed).expect("valid sizes");
    let lg = LogisticObjective::new(&data.train.samples, data.train.labels).expect("valid labels");
    (ls, lg)
}

fn gradient_suite(seed: u64) -> CheckOutcome {
    let (ls, lg) = small_objectives(seed);
    let objectives: [(&str, &dyn SmoothObjective); 2] = [("least squares", &ls), ("logistic", &lg)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
    let mut cases = 0;
    for (name, obj) in objectives {
        for _ in 0..20 {
            cases += 1;
            let x = random_point(&mut rng, obj.dim(), 1.0);
            let g = obj.gradient(&x);
            let fd = finite_difference_gradient(|p| obj.value(p), &x, 1e-5);
            let denom = g.dot(&g).sqrt().max(1.0);
            let err = (&g - &fd).mapv(|v| v * v).sum().sqrt() / denom;
            if err > 1e-6 {
                return outcome(
                    Suite::Gradient,
                    cases,
                    Some(format!("{name} at {x}: relative gradient error {err:e}")),
                );
            }
        }
    }
    outcome(Suite::Gradient, cases, None)
}

fn descent_suite(seed: u64) -> CheckOutcome {
    let (ls, lg) = small_objectives(seed);
    let objectives: [(&str, &dyn SmoothObjective); 2] = [("least squares", &ls), ("logistic", &lg)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
    let mut cases = 0;
    for (name, obj) in objectives {
        let l = obj.lipschitz();
        for _ in 0..200 {
            cases += 1;
            let x = random_point(&mut rng, obj.dim(), 2.0);
            let scale = rng.random_range(1e-3..2.0);
            let y = &x + &random_point(&mut rng, obj.dim(), scale);
            let d = &y - &x;
            let fx = obj.value(&x);
            let upper = fx + obj.gradient(&x).dot(&d) + 0.5 * l * d.dot(&d);
            let fy = obj.value(&y);
            if fy > upper + 1e-10 * (1.0 + fx.abs()) {
                return outcome(
                    Suite::Descent,
                    cases,
                    Some(format!("{name}: f(y)={fy} exceeds quadratic upper bound {upper} at x={x}, y={y}")),
                );
            }
        }
    }

    let cfg = SolverConfig {
        lambda: 0.05,
        ..SolverConfig::default()
    };
    let bounds = BoxConstraint::uniform(ls.dim(), -10.0, 10.0).expect("ordered bounds");
    let problem = Problem::new(&ls, bounds).expect("positive Lipschitz constant");
    let x0 = Array1::zeros(ls.dim());
    for (name, run) in [
        ("PIHT", piht(&problem, &cfg, &x0)),
        ("APIHT", apiht(&problem, &cfg, &ApihtOptions::default(), &x0)),
    ] {
        cases += 1;
        match run {
            Ok(res) => {
                if let Some(a) = res.trace.first_ascent(1e-12) {
                    return outcome(
                        Suite::Descent,
                        cases,
                        Some(format!("{name}: H rose from {} to {} at iteration {}", a.previous, a.current, a.k)),
                    );
                }
            }
            Err(e) => return outcome(Suite::Descent, cases, Some(format!("{name} failed: {e}"))),
        }
    }
    outcome(Suite::Descent, cases, None)
}

fn restart_suite(seed: u64) -> CheckOutcome {
    let mut cases = 0;
    for rep in 0..5u64 {
        cases += 1;
        let inst = gen_cs_instance(20, 40, 3, 0.05, seed.wrapping_add(rep)).expect("valid sizes");
        let obj = LeastSquaresObjective::new(inst.a, inst.b).expect("nonzero matrix");
        let bounds = BoxConstraint::uniform(40, -1e10, 1e10).expect("ordered bounds");
        let problem = Problem::new(&obj, bounds).expect("positive Lipschitz constant");
        let cfg = SolverConfig {
            lambda: 0.05,
            ..SolverConfig::default()
        };
        let x0 = Array1::zeros(40);
        let forced = ApihtOptions {
            force_restart: true,
            ..ApihtOptions::default()
        };
        let (a, p) = match (apiht(&problem, &cfg, &forced, &x0), piht(&problem, &cfg, &x0)) {
            (Ok(a), Ok(p)) => (a, p),
            (Err(e), _) | (_, Err(e)) => return outcome(Suite::Restart, cases, Some(format!("solver failed: {e}"))),
        };
        if a.iterations != p.iterations || a.x != p.x {
            return outcome(
                Suite::Restart,
                cases,
                Some(format!(
                    "seed {}: always-restarted run took {} iterations, plain run {}; final gap {:e}",
                    seed.wrapping_add(rep),
                    a.iterations,
                    p.iterations,
                    dist_inf(&a.x, &p.x)
                )),
            );
        }
        let free = match apiht(&problem, &cfg, &ApihtOptions::default(), &x0) {
            Ok(r) => r,
            Err(e) => return outcome(Suite::Restart, cases, Some(format!("solver failed: {e}"))),
        };
        let (k, g) = (free.iterations, free.trace.ncgf_total());
        if g < k || g > 2 * k {
            return outcome(
                Suite::Restart,
                cases,
                Some(format!("{k} iterations used {g} gradient evaluations")),
            );
        }
    }
    outcome(Suite::Restart, cases, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn all_suites_pass() {
        for o in run_checks(&Suite::ALL, None, 1) {
            assert!(o.passed, "{o}");
        }
    }

    #[test]
    fn tie_flip_is_detected() {
        let o = &run_checks(&[Suite::Prox], Some(Fault::TieRuleFlip), 1)[0];
        assert!(!o.passed);
        assert!(o.detail.as_deref().unwrap().contains("tie"));
    }
}
