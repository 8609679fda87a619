use ndarray::{s, Array1, Array2};

use super::{power_method_lmax, ObjectiveError, SmoothObjective, POWER_MAX_ITER, POWER_SEED, POWER_TOL};
use crate::linalg::{mat_t_vec, mat_vec};

/// Mean logistic loss over the augmented variable `w = (u, v)`:
/// `(1/N) Σ log(1 + exp(−y_i (uᵀx_i + v)))`.
///
/// The intercept `v` is the last coordinate of `w`.
#[derive(Debug, Clone)]
pub struct LogisticObjective {
    // Samples with a trailing column of ones.
    z: Array2<f64>,
    labels: Array1<f64>,
    lipschitz: f64,
}

/// `[X, 1]`.
pub fn augment_with_intercept(samples: &Array2<f64>) -> Array2<f64> {
    let (n_samples, n_features) = samples.dim();
    let mut z = Array2::ones((n_samples, n_features + 1));
    z.slice_mut(s![.., ..n_features]).assign(samples);
    z
}

/// `log(1 + exp(t))` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `1 / (1 + exp(t))` without overflow.
fn sigmoid_neg(t: f64) -> f64 {
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

impl LogisticObjective {
    pub fn new(samples: &Array2<f64>, labels: Array1<f64>) -> Result<Self, ObjectiveError> {
        if samples.nrows() != labels.len() {
            return Err(ObjectiveError::DimensionMismatch {
                what: "labels",
                expected: samples.nrows(),
                found: labels.len(),
            });
        }
        if samples.nrows() == 0 {
            return Err(ObjectiveError::Empty);
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(ObjectiveError::NonFinite);
        }
        if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &y)| y != 1.0 && y != -1.0) {
            return Err(ObjectiveError::InvalidLabel { index, value });
        }
        let z = augment_with_intercept(samples);
        let lipschitz = Self::curvature_bound(&z);
        Ok(Self { z, labels, lipschitz })
    }

    /// `λ_max(ZᵀZ) / (4N)`: each scalar logistic curvature is at most ¼.
    fn curvature_bound(z: &Array2<f64>) -> f64 {
        let est = power_method_lmax(z, POWER_TOL, POWER_MAX_ITER, POWER_SEED);
        est.lmax / (4.0 * z.nrows() as f64)
    }

    pub fn n_samples(&self) -> usize {
        self.z.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.z.ncols() - 1
    }

    /// Mask with every feature weight penalized and the intercept free.
    pub fn penalty_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.dim()];
        mask[self.n_features()] = false;
        mask
    }

    fn margins(&self, w: &Array1<f64>) -> Array1<f64> {
        assert_eq!(w.len(), self.dim(), "dimension mismatch");
        mat_vec(&self.z, w) * &self.labels
    }
}

impl SmoothObjective for LogisticObjective {
    fn dim(&self) -> usize {
        self.z.ncols()
    }

    fn value(&self, w: &Array1<f64>) -> f64 {
        let margins = self.margins(w);
        margins.iter().map(|&t| softplus(-t)).sum::<f64>() / self.n_samples() as f64
    }

    fn gradient(&self, w: &Array1<f64>) -> Array1<f64> {
        let margins = self.margins(w);
        let scale = -1.0 / self.n_samples() as f64;
        let weights: Array1<f64> = margins
            .iter()
            .zip(self.labels.iter())
            .map(|(&t, &y)| scale * y * sigmoid_neg(t))
            .collect();
        mat_t_vec(&self.z, &weights)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}
