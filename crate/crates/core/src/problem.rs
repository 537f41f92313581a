//! Training data and the matrices derived from it.
//!
//! For labels `y` and features `x_i`, the problem works with
//! `A = [y_1 x_1; …; y_m x_m]` (m × n), `B = [A y]` (m × (n+1)), the
//! generalized inverse `B† = (BᵀB)⁻¹Bᵀ` when `B` has full column rank, and
//! `H = diag(I_n, 0)·B†` together with `λ_H = λ_max(HᵀH)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_finite, ensure_len, Error, Result};
use crate::linalg::{gram_factor_if_full_rank, largest_eigenvalue_gram, PowerIteration};
use crate::ramp::ramp_unchecked;

/// Labeled samples with labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DMatrix<f64>,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyDataset);
        }
        ensure_len("label vector", features.len(), labels.len())?;
        let n = features[0].len();
        for (index, row) in features.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RaggedSample {
                    index,
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let m = features.len();
        let matrix = DMatrix::from_fn(m, n, |i, j| features[i][j]);
        Self::from_matrix(matrix, labels)
    }

    pub fn from_matrix(features: DMatrix<f64>, labels: Vec<f64>) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::EmptyDataset);
        }
        ensure_len("label vector", features.nrows(), labels.len())?;
        if let Some(&bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidLabel(bad));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature value"));
        }
        Ok(Self { features, labels })
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn sample(&self, i: usize) -> Vec<f64> {
        self.features.row(i).iter().copied().collect()
    }

    /// `⟨x_i, w⟩`; `w` must have `n_features` entries.
    pub fn dot(&self, i: usize, w: &[f64]) -> f64 {
        self.features.row(i).iter().zip(w).map(|(a, b)| a * b).sum()
    }

    /// Returns a copy with one more sample appended.
    pub fn with_sample(&self, x: &[f64], y: f64) -> Result<Self> {
        ensure_len("appended sample", self.n_features(), x.len())?;
        let m = self.n_samples();
        let mut features = self.features.clone().insert_row(m, 0.0);
        features.row_mut(m).copy_from_slice(x);
        let mut labels = self.labels.clone();
        labels.push(y);
        Self::from_matrix(features, labels)
    }

    /// Reorders samples so that new sample `k` is old sample `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        ensure_len("permutation", self.n_samples(), order.len())?;
        let features = DMatrix::from_fn(self.n_samples(), self.n_features(), |i, j| {
            self.features[(order[i], j)]
        });
        let labels = order.iter().map(|&k| self.labels[k]).collect();
        Self::from_matrix(features, labels)
    }
}

/// `B†`, `H` and `λ_H`, present only when `B` has full column rank.
#[derive(Debug, Clone)]
pub struct RankData {
    pub b_dagger: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub lambda_h: PowerIteration,
}

#[derive(Debug, Clone)]
pub struct ProblemData {
    a: DMatrix<f64>,
    y: DVector<f64>,
    b: DMatrix<f64>,
    rank: Option<RankData>,
}

impl ProblemData {
    pub fn build(dataset: &Dataset) -> Result<Self> {
        let m = dataset.n_samples();
        let n = dataset.n_features();
        let y = DVector::from_column_slice(dataset.labels());
        let a = DMatrix::from_fn(m, n, |i, j| y[i] * dataset.features()[(i, j)]);
        let mut b = a.clone().insert_column(n, 0.0);
        b.column_mut(n).copy_from(&y);

        let rank = gram_factor_if_full_rank(&b).map(|gram| {
            let b_dagger = gram.inverse_times(&b.transpose());
            let mut h = b_dagger.clone();
            h.row_mut(n).fill(0.0);
            let lambda_h = largest_eigenvalue_gram(&h);
            RankData {
                b_dagger,
                h,
                lambda_h,
            }
        });
        Ok(Self { a, y, b, rank })
    }

    pub fn n_samples(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.a.ncols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn full_column_rank(&self) -> bool {
        self.rank.is_some()
    }

    pub fn rank_data(&self) -> Option<&RankData> {
        self.rank.as_ref()
    }

    pub fn b_dagger(&self) -> Option<&DMatrix<f64>> {
        self.rank.as_ref().map(|r| &r.b_dagger)
    }

    pub fn h(&self) -> Option<&DMatrix<f64>> {
        self.rank.as_ref().map(|r| &r.h)
    }

    /// `λ_max(HᵀH)`; fails when `B` is rank deficient.
    pub fn lambda_h(&self) -> Result<f64> {
        self.rank
            .as_ref()
            .map(|r| r.lambda_h.value)
            .ok_or(Error::RankDeficient)
    }

    pub(crate) fn check_weights(&self, w: &DVector<f64>) -> Result<()> {
        ensure_len("weight vector", self.n_features(), w.len())
    }

    /// `u = 1 − A w − b y`.
    pub fn slack(&self, w: &DVector<f64>, b: f64) -> Result<DVector<f64>> {
        self.check_weights(w)?;
        ensure_finite(b, "bias")?;
        Ok(self.slack_unchecked(w.as_slice(), b))
    }

    pub(crate) fn slack_unchecked(&self, w: &[f64], b: f64) -> DVector<f64> {
        DVector::from_fn(self.n_samples(), |i, _| {
            let aw: f64 = (0..w.len()).map(|j| self.a[(i, j)] * w[j]).sum();
            1.0 - aw - b * self.y[i]
        })
    }

    /// `f_r(w; b) = ½‖w‖² + C·L_r(1 − A w − b y)`.
    pub fn objective(&self, w: &DVector<f64>, b: f64, c: f64) -> Result<f64> {
        self.check_weights(w)?;
        ensure_finite(b, "bias")?;
        Ok(self.objective_unchecked(w.as_slice(), b, c))
    }

    #[inline]
    pub(crate) fn objective_unchecked(&self, w: &[f64], b: f64, c: f64) -> f64 {
        let mut loss = 0.0;
        for i in 0..self.n_samples() {
            let mut aw = 0.0;
            for (j, wj) in w.iter().enumerate() {
                aw += self.a[(i, j)] * wj;
            }
            loss += ramp_unchecked(1.0 - aw - b * self.y[i]);
        }
        0.5 * w.iter().map(|v| v * v).sum::<f64>() + c * loss
    }
}
