//! Smooth convex data-fidelity terms.
//!
//! Each objective is immutable after construction and caches a Lipschitz
//! constant for its gradient. Evaluation counting happens in the solvers, not
//! here, so objectives can be shared freely between concurrent runs.

mod least_squares;
mod logistic;
mod power;

pub use least_squares::LeastSquaresObjective;
pub use logistic::{augment_with_intercept, LogisticObjective};
pub use power::{power_method_lmax, PowerEstimate, POWER_MAX_ITER, POWER_SEED, POWER_TOL};

use ndarray::Array1;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectiveError {
    #[error("dimension mismatch: {what} has {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("labels must be -1 or +1, found {value} at sample {index}")]
    InvalidLabel { index: usize, value: f64 },
    #[error("data contains a non-finite entry")]
    NonFinite,
    #[error("gradient Lipschitz constant is zero; the objective is degenerate")]
    DegenerateLipschitz,
    #[error("objective has no samples")]
    Empty,
}

/// A convex, differentiable `f` with `L`-Lipschitz gradient.
pub trait SmoothObjective: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Array1<f64>) -> f64;
    fn gradient(&self, x: &Array1<f64>) -> Array1<f64>;
    fn lipschitz(&self) -> f64;
}

/// Central differences `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn finite_difference_gradient<F>(f: F, x: &Array1<f64>, h: f64) -> Array1<f64>
where
    F: Fn(&Array1<f64>) -> f64,
{
    assert!(h > 0.0, "step must be positive");
    let mut probe = x.clone();
    let mut out = Array1::zeros(x.len());
    for i in 0..x.len() {
        let xi = x[i];
        probe[i] = xi + h;
        let fp = f(&probe);
        probe[i] = xi - h;
        let fm = f(&probe);
        probe[i] = xi;
        out[i] = (fp - fm) / (2.0 * h);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn fd_exact_on_quadratic() {
        let f = |x: &Array1<f64>| 1.5 * x[0] * x[0] - x[0] * x[1] + 0.5 * x[1] * x[1] + 3.0 * x[1];
        let x = array![0.7, -1.3];
        let g = finite_difference_gradient(f, &x, 1e-3);
        let exact = array![3.0 * x[0] - x[1], -x[0] + x[1] + 3.0];
        for i in 0..2 {
            assert!((g[i] - exact[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn fd_of_constant_is_zero() {
        let g = finite_difference_gradient(|_| 4.2, &array![1.0, 2.0, 3.0], 1e-5);
        assert_eq!(g, array![0.0, 0.0, 0.0]);
    }
}
