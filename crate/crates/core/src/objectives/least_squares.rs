use ndarray::{Array1, Array2};

use super::{power_method_lmax, ObjectiveError, SmoothObjective, POWER_MAX_ITER, POWER_SEED, POWER_TOL};
use crate::linalg::{mat_t_vec, mat_vec};

/// `f(x) = ½‖Ax − b‖²`, `∇f(x) = Aᵀ(Ax − b)`, `L = λ_max(AᵀA)`.
#[derive(Debug, Clone)]
pub struct LeastSquaresObjective {
    a: Array2<f64>,
    b: Array1<f64>,
    lipschitz: f64,
}

impl LeastSquaresObjective {
    pub fn new(a: Array2<f64>, b: Array1<f64>) -> Result<Self, ObjectiveError> {
        Self::check(&a, &b)?;
        let est = power_method_lmax(&a, POWER_TOL, POWER_MAX_ITER, POWER_SEED);
        Self::with_lipschitz(a, b, est.lmax)
    }

    /// Skips the power method; `lipschitz` must bound `λ_max(AᵀA)`.
    pub fn with_lipschitz(a: Array2<f64>, b: Array1<f64>, lipschitz: f64) -> Result<Self, ObjectiveError> {
        Self::check(&a, &b)?;
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return Err(ObjectiveError::DegenerateLipschitz);
        }
        Ok(Self { a, b, lipschitz })
    }

    fn check(a: &Array2<f64>, b: &Array1<f64>) -> Result<(), ObjectiveError> {
        if a.nrows() != b.len() {
            return Err(ObjectiveError::DimensionMismatch {
                what: "b",
                expected: a.nrows(),
                found: b.len(),
            });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(ObjectiveError::NonFinite);
        }
        Ok(())
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &Array1<f64> {
        &self.b
    }

    pub fn residual(&self, x: &Array1<f64>) -> Array1<f64> {
        mat_vec(&self.a, x) - &self.b
    }
}

impl SmoothObjective for LeastSquaresObjective {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &Array1<f64>) -> f64 {
        let r = self.residual(x);
        0.5 * r.dot(&r)
    }

    fn gradient(&self, x: &Array1<f64>) -> Array1<f64> {
        mat_t_vec(&self.a, &self.residual(x))
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_operator() {
        let f = LeastSquaresObjective::new(Array2::eye(2), array![0.0, 0.0]).unwrap();
        let x = array![1.0, 1.0];
        assert_eq!(f.value(&x), 1.0);
        assert_eq!(f.gradient(&x), array![1.0, 1.0]);
        assert!((f.lipschitz() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_residual() {
        let a = array![[1.0, 2.0], [0.0, 1.0], [1.0, -1.0]];
        let x = array![0.5, -2.0];
        let b = a.dot(&x);
        let f = LeastSquaresObjective::new(a, b).unwrap();
        assert_eq!(f.value(&x), 0.0);
        assert_eq!(f.gradient(&x), array![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            LeastSquaresObjective::new(Array2::eye(2), array![1.0]),
            Err(ObjectiveError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            LeastSquaresObjective::new(Array2::zeros((2, 2)), array![1.0, 0.0]),
            Err(ObjectiveError::DegenerateLipschitz)
        ));
    }
}
