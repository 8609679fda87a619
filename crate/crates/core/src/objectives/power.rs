use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{mat_t_vec, mat_vec, norm2};

pub const POWER_TOL: f64 = 1e-8;
pub const POWER_MAX_ITER: usize = 5000;
pub const POWER_SEED: u64 = 0x5eed_1a4b;

// Below this the Gram matrix of the short side is formed once and iterated on.
const GRAM_MAX_DIM: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    /// Estimate of `λ_max(AᵀA)`. Inflated by 1% when `converged` is false.
    pub lmax: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest eigenvalue of `AᵀA` by power iteration from a seeded random start.
///
/// Stops when the Rayleigh quotient changes by less than `tol` relative to
/// its current value. `AᵀA` and `AAᵀ` share their nonzero spectrum, so the
/// iteration runs on whichever side is shorter.
pub fn power_method_lmax(a: &Array2<f64>, tol: f64, max_iter: usize, seed: u64) -> PowerEstimate {
    assert!(tol > 0.0, "tolerance must be positive");
    let (m, n) = a.dim();
    let side = m.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let gram = (side <= GRAM_MAX_DIM).then(|| {
        if m <= n {
            a.dot(&a.t())
        } else {
            a.t().dot(a)
        }
    });
    let apply = |v: &Array1<f64>| -> Array1<f64> {
        match &gram {
            Some(g) => g.dot(v),
            None if m <= n => mat_vec(a, &mat_t_vec(a, v)),
            None => mat_t_vec(a, &mat_vec(a, v)),
        }
    };

    let mut v: Array1<f64> = (0..side).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nv = norm2(&v);
    if nv == 0.0 {
        return PowerEstimate { lmax: 0.0, iterations: 0, converged: true };
    }
    v /= nv;

    let mut estimate = f64::NAN;
    for it in 1..=max_iter {
        let w = apply(&v);
        let rayleigh = v.dot(&w);
        let nw = norm2(&w);
        if nw == 0.0 {
            return PowerEstimate { lmax: 0.0, iterations: it, converged: true };
        }
        let converged = (rayleigh - estimate).abs() <= tol * rayleigh.abs();
        estimate = rayleigh;
        if converged {
            return PowerEstimate { lmax: estimate, iterations: it, converged: true };
        }
        v = w / nw;
    }
    log::warn!(
        "power method did not reach relative tolerance {tol:e} in {max_iter} iterations; \
         inflating last estimate {estimate} by 1%"
    );
    PowerEstimate {
        lmax: estimate * 1.01,
        iterations: max_iter,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_has_unit_eigenvalue() {
        let est = power_method_lmax(&Array2::eye(3), POWER_TOL, POWER_MAX_ITER, 1);
        assert!(est.converged);
        assert!((est.lmax - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_squares_largest_entry() {
        let a = Array2::from_diag(&array![1.0, 2.0, 3.0]);
        let est = power_method_lmax(&a, POWER_TOL, POWER_MAX_ITER, 1);
        assert!((est.lmax - 9.0).abs() / 9.0 < 1e-7);
    }

    #[test]
    fn wide_and_tall_agree() {
        let a = array![[1.0, -2.0, 0.5, 3.0], [0.0, 1.0, 1.0, -1.0]];
        let wide = power_method_lmax(&a, 1e-12, POWER_MAX_ITER, 3).lmax;
        let tall = power_method_lmax(&a.t().to_owned(), 1e-12, POWER_MAX_ITER, 3).lmax;
        assert!((wide - tall).abs() / wide < 1e-10);
    }

    #[test]
    fn non_convergence_inflates() {
        // Two nearly equal eigenvalues and a single iteration.
        let a = Array2::from_diag(&array![1.0, 0.999_999]);
        let est = power_method_lmax(&a, 1e-15, 1, 9);
        assert!(!est.converged);
        assert!(est.lmax > 0.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = array![[1.0, 2.0], [3.0, 4.0], [0.5, -1.0]];
        let x = power_method_lmax(&a, 1e-6, 50, 11);
        let y = power_method_lmax(&a, 1e-6, 50, 11);
        assert_eq!(x, y);
    }
}
