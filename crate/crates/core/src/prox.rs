//! Closed-form proximal and projection operators.
//!
//! Every solver step in this crate reduces to one of these: a box projection,
//! soft thresholding (the ℓ1 prox), hard thresholding (the ℓ0 prox) or the
//! separable box-constrained ℓ0 prox. Thresholded coordinates are written as a
//! literal `0.0`, so support sets computed from the outputs are exact.

use ndarray::{Array1, ArrayView1, Zip};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which element of the solution set is returned at an exact tie between
/// zero and a nonzero candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Prefer the sparser point.
    #[default]
    Zero,
    /// Keep the nonzero candidate.
    Keep,
}

impl TieRule {
    pub fn flipped(self) -> Self {
        match self {
            TieRule::Zero => TieRule::Keep,
            TieRule::Keep => TieRule::Zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoxError {
    #[error("lower has length {lower} but upper has length {upper}")]
    LengthMismatch { lower: usize, upper: usize },
    #[error("coordinate {index}: lower bound {lower} exceeds upper bound {upper}")]
    Inverted { index: usize, lower: f64, upper: f64 },
    #[error("coordinate {index}: bound is NaN")]
    NotANumber { index: usize },
}

/// The feasible set `{x : lower <= x <= upper}`. Bounds may be infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxConstraint {
    lower: Array1<f64>,
    upper: Array1<f64>,
}

impl BoxConstraint {
    pub fn new(lower: Array1<f64>, upper: Array1<f64>) -> Result<Self, BoxError> {
        if lower.len() != upper.len() {
            return Err(BoxError::LengthMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        for (index, (&l, &u)) in lower.iter().zip(upper.iter()).enumerate() {
            if l.is_nan() || u.is_nan() {
                return Err(BoxError::NotANumber { index });
            }
            if l > u {
                return Err(BoxError::Inverted {
                    index,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// Same interval `[lo, hi]` on every coordinate.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self, BoxError> {
        Self::new(Array1::from_elem(dim, lo), Array1::from_elem(dim, hi))
    }

    pub fn unbounded(dim: usize) -> Self {
        Self {
            lower: Array1::from_elem(dim, f64::NEG_INFINITY),
            upper: Array1::from_elem(dim, f64::INFINITY),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> ArrayView1<'_, f64> {
        self.lower.view()
    }

    pub fn upper(&self) -> ArrayView1<'_, f64> {
        self.upper.view()
    }

    pub fn contains(&self, x: &Array1<f64>) -> bool {
        assert_eq!(x.len(), self.dim(), "dimension mismatch");
        Zip::from(x)
            .and(&self.lower)
            .and(&self.upper)
            .all(|&v, &l, &u| l <= v && v <= u)
    }

    pub fn clamp_coord(&self, index: usize, value: f64) -> f64 {
        value.clamp(self.lower[index], self.upper[index])
    }

    /// Smallest nonzero magnitude a ℓ0-prox output can take when the
    /// unconstrained hard threshold is `gamma`: the minimum over the nonzero
    /// members of `{|l_j|, |u_j|, gamma}`.
    pub fn magnitude_floor(&self, gamma: f64) -> f64 {
        self.lower
            .iter()
            .chain(self.upper.iter())
            .map(|v| v.abs())
            .chain(std::iter::once(gamma))
            .filter(|&v| v != 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Euclidean projection onto the box (componentwise clamp).
pub fn project_box(x: &Array1<f64>, bounds: &BoxConstraint) -> Array1<f64> {
    assert_eq!(x.len(), bounds.dim(), "dimension mismatch");
    Zip::from(x)
        .and(&bounds.lower)
        .and(&bounds.upper)
        .map_collect(|&v, &l, &u| v.clamp(l, u))
}

#[inline]
pub fn soft_threshold_scalar(c: f64, lam: f64) -> f64 {
    let shrunk = c.abs() - lam;
    if shrunk > 0.0 {
        c.signum() * shrunk
    } else {
        0.0
    }
}

/// `sign(c) * max(|c| - lam, 0)` componentwise; the prox of `lam * ||x||_1`.
pub fn soft_threshold(c: &Array1<f64>, lam: f64) -> Array1<f64> {
    assert!(lam > 0.0, "soft threshold level must be positive");
    c.mapv(|v| soft_threshold_scalar(v, lam))
}

/// Hard-threshold level together with its boundary convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub gamma: f64,
    pub tie_rule: TieRule,
}

impl Threshold {
    pub fn new(gamma: f64) -> Self {
        assert!(gamma >= 0.0, "threshold must be nonnegative");
        Self {
            gamma,
            tie_rule: TieRule::default(),
        }
    }

    pub fn with_tie_rule(mut self, tie_rule: TieRule) -> Self {
        self.tie_rule = tie_rule;
        self
    }
}

#[inline]
pub fn hard_threshold_scalar(c: f64, gamma: f64, tie_rule: TieRule) -> f64 {
    let mag = c.abs();
    if mag > gamma {
        c
    } else if mag < gamma {
        0.0
    } else {
        match tie_rule {
            TieRule::Zero => 0.0,
            TieRule::Keep => c,
        }
    }
}

pub fn hard_threshold(c: &Array1<f64>, th: Threshold) -> Array1<f64> {
    assert!(th.gamma >= 0.0, "threshold must be nonnegative");
    c.mapv(|v| hard_threshold_scalar(v, th.gamma, th.tie_rule))
}

/// `lam * ||x||_0 + (x - c)^2 / 2` restricted to `[lo, hi]` (infinite outside).
pub fn l0_box_objective_1d(x: f64, c: f64, lam: f64, lo: f64, hi: f64) -> f64 {
    if x < lo || x > hi {
        return f64::INFINITY;
    }
    let penalty = if x != 0.0 { lam } else { 0.0 };
    penalty + 0.5 * (x - c) * (x - c)
}

/// Global minimizer of `lam * ||x||_0 + (x - c)^2 / 2` over `[lo, hi]`.
///
/// The quadratic part alone is minimized by `clamp(c)`, and the ℓ0 term only
/// changes the value at zero, so the answer is one of `{0, clamp(c)}`:
///
/// * `0` outside the interval: `clamp(c)`.
/// * `c` inside the interval: hard thresholding at `sqrt(2 lam)`.
/// * `c` beyond a bound: whichever of `h(0)` and `h(bound)` is smaller.
///
/// Panics if `lo > hi` or `lam <= 0`.
pub fn prox_l0_box_1d(c: f64, lam: f64, lo: f64, hi: f64, tie_rule: TieRule) -> f64 {
    assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
    assert!(lam > 0.0, "l0 weight must be positive");
    let p = c.clamp(lo, hi);
    if lo > 0.0 || hi < 0.0 {
        return p;
    }
    if p == 0.0 {
        return 0.0;
    }
    if p == c {
        return hard_threshold_scalar(c, (2.0 * lam).sqrt(), tie_rule);
    }
    // h(p) - h(0)
    let diff = lam + 0.5 * p * p - c * p;
    if diff < 0.0 {
        p
    } else if diff > 0.0 {
        0.0
    } else {
        match tie_rule {
            TieRule::Zero => 0.0,
            TieRule::Keep => p,
        }
    }
}

/// Separable box-constrained ℓ0 prox: `prox_l0_box_1d` on each coordinate.
pub fn prox_l0_box(
    c: &Array1<f64>,
    lam: f64,
    bounds: &BoxConstraint,
    tie_rule: TieRule,
) -> Array1<f64> {
    assert_eq!(c.len(), bounds.dim(), "dimension mismatch");
    Zip::from(c)
        .and(&bounds.lower)
        .and(&bounds.upper)
        .map_collect(|&v, &l, &u| prox_l0_box_1d(v, lam, l, u, tie_rule))
}

/// As [`prox_l0_box`], but coordinates with `penalized[i] == false` only get
/// the box projection.
pub fn prox_l0_box_masked(
    c: &Array1<f64>,
    lam: f64,
    bounds: &BoxConstraint,
    tie_rule: TieRule,
    penalized: &[bool],
) -> Array1<f64> {
    assert_eq!(c.len(), bounds.dim(), "dimension mismatch");
    assert_eq!(c.len(), penalized.len(), "mask length mismatch");
    let mut out = Array1::zeros(c.len());
    for i in 0..c.len() {
        let (l, u) = (bounds.lower[i], bounds.upper[i]);
        out[i] = if penalized[i] {
            prox_l0_box_1d(c[i], lam, l, u, tie_rule)
        } else {
            c[i].clamp(l, u)
        };
    }
    out
}

/// Soft thresholding on the masked coordinates, identity elsewhere.
pub fn soft_threshold_masked(c: &Array1<f64>, lam: f64, penalized: &[bool]) -> Array1<f64> {
    assert_eq!(c.len(), penalized.len(), "mask length mismatch");
    let mut out = c.clone();
    for (v, &p) in out.iter_mut().zip(penalized) {
        if p {
            *v = soft_threshold_scalar(*v, lam);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn project_box_examples() {
        let b = BoxConstraint::uniform(3, -1.0, 1.0).unwrap();
        assert_eq!(project_box(&array![2.0, -3.0, 0.0], &b), array![1.0, -1.0, 0.0]);
        let inside = array![0.5, -0.25, 1.0];
        assert_eq!(project_box(&inside, &b), inside);
        let b1 = BoxConstraint::uniform(1, 1.0, 3.0).unwrap();
        assert_eq!(project_box(&array![0.5], &b1), array![1.0]);
    }

    #[test]
    fn box_rejects_bad_bounds() {
        assert!(matches!(
            BoxConstraint::new(array![0.0, 2.0], array![1.0, 1.0]),
            Err(BoxError::Inverted { index: 1, .. })
        ));
        assert!(matches!(
            BoxConstraint::new(array![0.0], array![1.0, 1.0]),
            Err(BoxError::LengthMismatch { .. })
        ));
        assert!(BoxConstraint::new(array![f64::NAN], array![1.0]).is_err());
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(&array![2.0], 0.5), array![1.5]);
        assert_eq!(soft_threshold(&array![0.3], 0.5), array![0.0]);
        assert_eq!(soft_threshold(&array![-2.0], 0.5), array![-1.5]);
    }

    #[test]
    fn hard_threshold_examples() {
        assert_eq!(hard_threshold(&array![3.0, 0.5], Threshold::new(1.0)), array![3.0, 0.0]);
        assert_eq!(hard_threshold(&array![1.0], Threshold::new(1.0)), array![0.0]);
        let keep = Threshold::new(1.0).with_tie_rule(TieRule::Keep);
        assert_eq!(hard_threshold(&array![1.0], keep), array![1.0]);
    }

    #[test]
    fn prox_1d_examples() {
        assert_eq!(prox_l0_box_1d(0.0, 1.0, -1.0, 1.0, TieRule::Zero), 0.0);
        // zero is infeasible: plain projection
        assert_eq!(prox_l0_box_1d(1.2, 0.5, 2.0, 3.0, TieRule::Zero), 2.0);
        // h(1) = 0.5 + 0.5 = 1.0 < h(0) = 2.0
        assert_eq!(prox_l0_box_1d(2.0, 0.5, -1.0, 1.0, TieRule::Zero), 1.0);
        // sqrt(2 * 0.5) = 1 > 0.9
        assert_eq!(prox_l0_box_1d(0.9, 0.5, -1.0, 1.0, TieRule::Zero), 0.0);
    }

    #[test]
    fn prox_1d_tie_beyond_bound() {
        // c = 1.25, hi = 0.5, lam = 0.5: h(0.5) = 0.5 + 0.28125 = 0.78125 = h(0)
        let c = 1.25;
        assert_eq!(
            l0_box_objective_1d(0.5, c, 0.5, -1.0, 0.5),
            l0_box_objective_1d(0.0, c, 0.5, -1.0, 0.5)
        );
        assert_eq!(prox_l0_box_1d(c, 0.5, -1.0, 0.5, TieRule::Zero), 0.0);
        assert_eq!(prox_l0_box_1d(c, 0.5, -1.0, 0.5, TieRule::Keep), 0.5);
    }

    #[test]
    #[should_panic(expected = "invalid interval")]
    fn prox_1d_inverted_interval_panics() {
        prox_l0_box_1d(0.0, 1.0, 1.0, -1.0, TieRule::Zero);
    }

    #[test]
    fn prox_vector_examples() {
        let b = BoxConstraint::uniform(2, -1.0, 1.0).unwrap();
        assert_eq!(prox_l0_box(&array![0.0, 0.0], 3.0, &b, TieRule::Zero), array![0.0, 0.0]);
        assert_eq!(prox_l0_box(&array![2.0, 0.9], 0.5, &b, TieRule::Zero), array![1.0, 0.0]);
        let free = BoxConstraint::unbounded(1);
        assert_eq!(prox_l0_box(&array![2.0], 0.5, &free, TieRule::Zero), array![2.0]);
    }

    #[test]
    fn masked_prox_projects_unpenalized() {
        let b = BoxConstraint::uniform(2, -1.0, 1.0).unwrap();
        let out = prox_l0_box_masked(&array![0.1, 0.1], 0.5, &b, TieRule::Zero, &[true, false]);
        assert_eq!(out, array![0.0, 0.1]);
        let out = prox_l0_box_masked(&array![0.1, 5.0], 0.5, &b, TieRule::Zero, &[true, false]);
        assert_eq!(out, array![0.0, 1.0]);
    }

    #[test]
    fn magnitude_floor_skips_zero_bounds() {
        let b = BoxConstraint::new(array![0.0, -0.3], array![2.0, 0.0]).unwrap();
        assert_eq!(b.magnitude_floor(1.0), 0.3);
        assert_eq!(BoxConstraint::unbounded(2).magnitude_floor(0.7), 0.7);
    }

    fn bounds_strategy() -> impl Strategy<Value = (f64, f64)> {
        prop_oneof![
            (-5.0..5.0f64, 0.0..5.0f64).prop_map(|(lo, w)| (lo, lo + w)),
            (-5.0..0.0f64).prop_map(|lo| (lo, f64::INFINITY)),
            (0.0..5.0f64).prop_map(|hi| (f64::NEG_INFINITY, hi)),
            Just((f64::NEG_INFINITY, f64::INFINITY)),
        ]
    }

    proptest! {
        #[test]
        fn prox_1d_is_feasible_and_beats_candidates(
            c in -6.0..6.0f64,
            lam in 1e-3..4.0f64,
            (lo, hi) in bounds_strategy(),
        ) {
            let v = prox_l0_box_1d(c, lam, lo, hi, TieRule::Zero);
            prop_assert!(lo <= v && v <= hi);
            let hv = l0_box_objective_1d(v, c, lam, lo, hi);
            for cand in [0.0, c.clamp(lo, hi), lo, hi] {
                if cand.is_finite() {
                    prop_assert!(hv <= l0_box_objective_1d(cand, c, lam, lo, hi) + 1e-12);
                }
            }
            if v != 0.0 {
                let floor = [lo.abs(), hi.abs(), (2.0 * lam).sqrt()]
                    .into_iter()
                    .filter(|&m| m != 0.0)
                    .fold(f64::INFINITY, f64::min);
                prop_assert!(v.abs() >= floor - 1e-12);
            }
        }

        #[test]
        fn prox_1d_unbounded_is_hard_threshold(c in -6.0..6.0f64, lam in 1e-3..4.0f64) {
            let v = prox_l0_box_1d(c, lam, f64::NEG_INFINITY, f64::INFINITY, TieRule::Zero);
            prop_assert_eq!(v, hard_threshold_scalar(c, (2.0 * lam).sqrt(), TieRule::Zero));
        }

        #[test]
        fn soft_threshold_is_nonexpansive(
            a in proptest::collection::vec(-10.0..10.0f64, 6),
            b in proptest::collection::vec(-10.0..10.0f64, 6),
            lam in 1e-3..3.0f64,
        ) {
            let (a, b) = (Array1::from(a), Array1::from(b));
            let d_out = (&soft_threshold(&a, lam) - &soft_threshold(&b, lam)).mapv(|v| v * v).sum().sqrt();
            let d_in = (&a - &b).mapv(|v| v * v).sum().sqrt();
            prop_assert!(d_out <= d_in + 1e-12);
        }
    }
}
