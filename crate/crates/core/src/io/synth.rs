use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Dataset;

/// Two unit-variance Gaussian blobs centered at `±(separation/2)·e₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_per_class: usize,
    pub separation: f64,
    /// Fraction of all samples moved deep into the opposite class.
    pub outlier_fraction: f64,
    pub dim: usize,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn new(n_per_class: usize, separation: f64, outlier_fraction: f64, seed: u64) -> Self {
        Self {
            n_per_class,
            separation,
            outlier_fraction,
            dim: 2,
            seed,
        }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    /// `⌈fraction · 2n⌉`, ignoring rounding noise in the product.
    pub fn outlier_count(&self) -> usize {
        let total = (2 * self.n_per_class) as f64;
        ((self.outlier_fraction * total) - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub dataset: Dataset,
    /// Zero-based indices of relocated samples, ascending.
    pub outliers: Vec<usize>,
}

/// Samples `n_per_class` positives then `n_per_class` negatives. Each
/// outlier keeps its label and its offset from its blob center, but its first
/// coordinate is moved to `−y · 10 · separation`. Deterministic per seed.
pub fn gen_synthetic(config: &SyntheticConfig) -> Result<SyntheticData> {
    if config.n_per_class == 0 || config.dim == 0 {
        return Err(Error::InvalidParameter(
            "n_per_class and dim must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&config.outlier_fraction) {
        return Err(Error::InvalidParameter(format!(
            "outlier fraction must be in [0, 1], got {}",
            config.outlier_fraction
        )));
    }
    if !(config.separation.is_finite() && config.separation >= 0.0) {
        return Err(Error::InvalidParameter(
            "separation must be finite and nonnegative".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let total = 2 * config.n_per_class;
    let half = config.separation / 2.0;
    let mut features = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for i in 0..total {
        let y = if i < config.n_per_class { 1.0 } else { -1.0 };
        let mut x: Vec<f64> = (0..config.dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        x[0] += y * half;
        features.push(x);
        labels.push(y);
    }

    let mut outliers = sample(&mut rng, total, config.outlier_count()).into_vec();
    outliers.sort_unstable();
    for &i in &outliers {
        let y = labels[i];
        let offset = features[i][0] - y * half;
        features[i][0] = -y * 10.0 * config.separation + offset;
    }

    Ok(SyntheticData {
        dataset: Dataset::new(features, labels)?,
        outliers,
    })
}
