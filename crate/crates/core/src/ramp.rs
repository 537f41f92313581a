//! Ramp (truncated hinge) loss, its subdifferential, and the primal
//! L_r-SVM objective `½‖w‖² + C·Σ ℓ_r(1 − y_i(⟨w, x_i⟩ + b))`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_len, Result};
use crate::problem::Dataset;

/// `ℓ_r(t)`: 0 below zero, linear on `[0, 1)`, capped at 1.
///
/// The breakpoints use exact comparisons, so `ℓ_r(0) = 0` and `ℓ_r(1) = 1`.
pub fn ramp_loss(t: f64) -> Result<f64> {
    ensure_finite(t, "ramp loss argument")?;
    Ok(ramp_unchecked(t))
}

#[inline]
pub(crate) fn ramp_unchecked(t: f64) -> f64 {
    if t >= 1.0 {
        1.0
    } else if t >= 0.0 {
        t
    } else {
        0.0
    }
}

/// `L_r(u) = Σ ℓ_r(u_i)`. The empty sum is 0.
pub fn ramp_loss_sum(u: &[f64]) -> Result<f64> {
    u.iter().try_fold(0.0, |acc, &t| Ok(acc + ramp_loss(t)?))
}

/// Closed interval `[lo, hi]` ⊆ `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubdiffInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SubdiffInterval {
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Euclidean distance from `v` to the interval (0 inside).
    pub fn distance(&self, v: f64) -> f64 {
        if v < self.lo {
            self.lo - v
        } else if v > self.hi {
            v - self.hi
        } else {
            0.0
        }
    }
}

/// Clarke subdifferential of `ℓ_r` at `t`.
pub fn ramp_subdiff(t: f64) -> Result<SubdiffInterval> {
    ensure_finite(t, "ramp subdifferential argument")?;
    Ok(if t == 0.0 || t == 1.0 {
        SubdiffInterval { lo: 0.0, hi: 1.0 }
    } else if t > 0.0 && t < 1.0 {
        SubdiffInterval::point(1.0)
    } else {
        SubdiffInterval::point(0.0)
    })
}

/// Primal objective `f_r(w; b)` on a dataset with penalty `c`.
pub fn objective(w: &[f64], b: f64, dataset: &Dataset, c: f64) -> Result<f64> {
    ensure_len("objective weight vector", dataset.n_features(), w.len())?;
    ensure_finite(b, "bias")?;
    let mut loss = 0.0;
    for i in 0..dataset.n_samples() {
        let margin = dataset.label(i) * (dataset.dot(i, w) + b);
        loss += ramp_loss(1.0 - margin)?;
    }
    Ok(0.5 * w.iter().map(|v| v * v).sum::<f64>() + c * loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_regions() {
        assert_eq!(ramp_loss(-0.5).unwrap(), 0.0);
        assert_eq!(ramp_loss(0.5).unwrap(), 0.5);
        assert_eq!(ramp_loss(3.0).unwrap(), 1.0);
        assert_eq!(ramp_loss(0.0).unwrap(), 0.0);
        assert_eq!(ramp_loss(1.0).unwrap(), 1.0);
        assert!(ramp_loss(f64::NAN).is_err());
        assert!(ramp_loss(f64::INFINITY).is_err());
    }

    #[test]
    fn vector_sum() {
        assert_eq!(ramp_loss_sum(&[0.0, 1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(ramp_loss_sum(&[-1.0, 0.5, 2.0]).unwrap(), 1.5);
        assert_eq!(ramp_loss_sum(&[0.0; 7]).unwrap(), 0.0);
        assert_eq!(ramp_loss_sum(&[]).unwrap(), 0.0);
    }

    #[test]
    fn subdiff_regions() {
        assert_eq!(ramp_subdiff(0.5).unwrap(), SubdiffInterval::point(1.0));
        assert_eq!(ramp_subdiff(2.0).unwrap(), SubdiffInterval::point(0.0));
        assert_eq!(ramp_subdiff(-2.0).unwrap(), SubdiffInterval::point(0.0));
        let kink = ramp_subdiff(0.0).unwrap();
        assert_eq!((kink.lo, kink.hi), (0.0, 1.0));
        assert_eq!(ramp_subdiff(1.0).unwrap(), kink);
        assert!(ramp_subdiff(f64::NAN).is_err());
    }

    #[test]
    fn objective_examples() {
        let cx = crate::io::fixtures::counterexample();
        let f = objective(&[0.5, 0.5], -2.0, &cx, 0.25).unwrap();
        assert_eq!(f, 0.5);

        // w = 0, b = 0 puts every u_i at 1.
        let f0 = objective(&[0.0, 0.0], 0.0, &cx, 0.25).unwrap();
        assert_eq!(f0, 0.25 * 3.0);

        let pos =
            Dataset::new(vec![vec![1.0], vec![-4.0], vec![2.5]], vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(objective(&[0.0], 5.0, &pos, 3.0).unwrap(), 0.0);

        assert!(objective(&[0.0], 0.0, &cx, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn ramp_is_clamp(t in -1e6f64..1e6) {
            let expected = if t <= 0.0 { 0.0 } else { t.min(1.0) };
            prop_assert_eq!(ramp_loss(t).unwrap(), expected);
        }

        #[test]
        fn ramp_is_bounded_and_monotone(a in -10f64..10.0, b in -10f64..10.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (fl, fh) = (ramp_loss(lo).unwrap(), ramp_loss(hi).unwrap());
            prop_assert!(fl <= fh);
            prop_assert!((0.0..=1.0).contains(&fl) && (0.0..=1.0).contains(&fh));
        }

        #[test]
        fn subdiff_is_derivative_off_kinks(t in -5f64..5.0) {
            prop_assume!(t != 0.0 && t != 1.0);
            let d = ramp_subdiff(t).unwrap();
            prop_assert!(d.is_singleton());
            let expected = if t > 0.0 && t < 1.0 { 1.0 } else { 0.0 };
            prop_assert_eq!(d.lo, expected);
        }

        #[test]
        fn objective_nonnegative_and_bounded_at_zero_weights(
            xs in proptest::collection::vec((-3f64..3.0, -3f64..3.0, any::<bool>()), 1..8),
            w0 in -2f64..2.0, w1 in -2f64..2.0, b in -5f64..5.0, c in 0.01f64..5.0,
        ) {
            let (feats, labels): (Vec<_>, Vec<_>) = xs
                .iter()
                .map(|&(a, bb, pos)| (vec![a, bb], if pos { 1.0 } else { -1.0 }))
                .unzip();
            let data = Dataset::new(feats, labels).unwrap();
            prop_assert!(objective(&[w0, w1], b, &data, c).unwrap() >= 0.0);
            prop_assert!(objective(&[0.0, 0.0], b, &data, c).unwrap() <= c * data.n_samples() as f64);
        }
    }
}
