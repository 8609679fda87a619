//! Small dense helpers shared by objectives and solvers.

use ndarray::{Array1, Array2};

/// `A x`.
pub fn mat_vec(a: &Array2<f64>, x: &Array1<f64>) -> Array1<f64> {
    assert_eq!(a.ncols(), x.len(), "dimension mismatch");
    a.dot(x)
}

/// `Aᵀ r`, accumulated row by row so the walk over `A` stays contiguous.
pub fn mat_t_vec(a: &Array2<f64>, r: &Array1<f64>) -> Array1<f64> {
    assert_eq!(a.nrows(), r.len(), "dimension mismatch");
    let mut out = Array1::zeros(a.ncols());
    for (row, &ri) in a.rows().into_iter().zip(r.iter()) {
        if ri != 0.0 {
            out.scaled_add(ri, &row);
        }
    }
    out
}

pub fn norm2(x: &Array1<f64>) -> f64 {
    x.dot(x).sqrt()
}

pub fn dist2(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dist_inf(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `x - g / step_inv`, the explicit gradient step every prox-gradient method shares.
pub fn gradient_step(x: &Array1<f64>, g: &Array1<f64>, step_inv: f64) -> Array1<f64> {
    let mut c = x.clone();
    c.scaled_add(-1.0 / step_inv, g);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn transpose_product_matches_ndarray() {
        let a = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let r = array![0.5, -1.0];
        assert_eq!(mat_t_vec(&a, &r), a.t().dot(&r));
    }

    #[test]
    fn distances() {
        let a = array![1.0, 2.0];
        let b = array![4.0, -2.0];
        assert_eq!(dist2(&a, &b), 5.0);
        assert_eq!(dist_inf(&a, &b), 4.0);
    }
}
