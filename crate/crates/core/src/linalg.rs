//! Small dense kernels: SPD solves, the full-column-rank test on `BᵀB`,
//! largest eigenvalue of a Gram matrix by power iteration, and
//! minimum-norm least squares.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_len, Error, Result};

/// Relative pivot threshold below which `BᵀB` is treated as singular.
pub const RANK_PIVOT_TOL: f64 = 1e-10;

/// Cholesky factor of a symmetric positive-definite matrix, reusable across
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl SpdFactor {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotPositiveDefinite);
        }
        let scale = matrix.amax().max(1.0);
        let n = matrix.nrows();
        for i in 0..n {
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::NotPositiveDefinite);
                }
            }
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        let chol = Cholesky::new(matrix.clone()).ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { matrix, chol })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Pivots `L_ii²` of the factorization.
    pub fn pivots(&self) -> Vec<f64> {
        let l = self.chol.l_dirty();
        (0..self.dim()).map(|i| l[(i, i)] * l[(i, i)]).collect()
    }

    /// Solves `M x = rhs` with one step of iterative refinement.
    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        ensure_len("SPD right-hand side", self.dim(), rhs.len())?;
        let mut x = self.chol.solve(rhs);
        let r = rhs - &self.matrix * &x;
        x += self.chol.solve(&r);
        Ok(x)
    }

    pub fn inverse_times(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(rhs)
    }
}

/// Solves `M x = rhs` for symmetric positive-definite `M`.
pub fn solve_spd(matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    SpdFactor::new(matrix.clone())?.solve(rhs)
}

/// Factors `BᵀB`; `None` when `B` is not numerically full column rank
/// (factorization fails or the smallest pivot is below
/// [`RANK_PIVOT_TOL`] times the largest).
pub fn gram_factor_if_full_rank(b: &DMatrix<f64>) -> Option<SpdFactor> {
    if b.nrows() < b.ncols() {
        return None;
    }
    let gram = b.transpose() * b;
    let factor = SpdFactor::new(gram).ok()?;
    let pivots = factor.pivots();
    let max = pivots.iter().cloned().fold(0.0, f64::max);
    let min = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    (min >= RANK_PIVOT_TOL * max).then_some(factor)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const POWER_REL_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 10_000;
const POWER_RESTART_SEED: u64 = 0x5eed_1a4b;

/// Largest eigenvalue of `HᵀH`, using only products with `H` and `Hᵀ`.
///
/// Starts from the normalized all-ones vector. If that start lies in the
/// null space of `H`, restarts once from a seeded random vector. Stops when
/// the Rayleigh quotient changes by at most [`POWER_REL_TOL`] relative and
/// the eigen-residual is small, or after [`POWER_MAX_ITER`] steps.
pub fn largest_eigenvalue_gram(h: &DMatrix<f64>) -> PowerIteration {
    let m = h.ncols();
    if m == 0 || h.nrows() == 0 {
        return PowerIteration {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut v = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    let mut restarted = false;
    let mut prev = f64::NAN;
    for it in 1..=POWER_MAX_ITER {
        let z = h.transpose() * (h * &v);
        let rq = v.dot(&z);
        let norm = z.norm();
        if norm.is_nan() || norm <= f64::MIN_POSITIVE {
            if restarted {
                return PowerIteration {
                    value: 0.0,
                    iterations: it,
                    converged: true,
                };
            }
            restarted = true;
            let mut rng = ChaCha8Rng::seed_from_u64(POWER_RESTART_SEED);
            v = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
            v.normalize_mut();
            prev = f64::NAN;
            continue;
        }
        let residual = (&z - &v * rq).norm();
        if (rq - prev).abs() <= POWER_REL_TOL * rq.abs() && residual <= 1e-5 * rq.abs() {
            return PowerIteration {
                value: rq,
                iterations: it,
                converged: true,
            };
        }
        prev = rq;
        v = z / norm;
    }
    PowerIteration {
        value: prev,
        iterations: POWER_MAX_ITER,
        converged: false,
    }
}

/// Minimum-norm least-squares solution of `M x = rhs` and the residual
/// `‖M x − rhs‖₂`.
pub fn min_norm_lstsq(matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    ensure_len("least-squares right-hand side", matrix.nrows(), rhs.len())?;
    if matrix.ncols() == 0 {
        return Ok((DVector::zeros(0), rhs.norm()));
    }
    let svd = matrix.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-12 * smax.max(f64::MIN_POSITIVE);
    let x = svd
        .solve(rhs, eps)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let residual = (matrix * &x - rhs).norm();
    Ok((x, residual))
}
