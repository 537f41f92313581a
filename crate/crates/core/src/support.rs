//! Support vectors at a P-stationary point: samples with nonzero multiplier.
//!
//! For `γC ≥ 2` the ramp prox never returns a value in `(0, √(2γC))`, so any
//! sample with `λ_i ≠ 0` must have `u_i = 0`, i.e. it sits on one of the
//! hyperplanes `⟨w, x⟩ + b = ±1`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::certify::{check_pstationary, PrimalDualPoint, Verdict};
use crate::error::{ensure_len, Error, Result};
use crate::problem::ProblemData;

pub const DEFAULT_SV_TOL: f64 = 1e-8;

/// Multiplier cutoff for a point certified at `tol` with step `gamma`.
///
/// Off the support the prox residual is `γ|λ_i|`, so a certificate at `tol`
/// only pins those multipliers to `|λ_i| ≤ tol/γ`; the cutoff is twice that,
/// and never below [`DEFAULT_SV_TOL`].
pub fn support_threshold(gamma: f64, tol: f64) -> f64 {
    DEFAULT_SV_TOL.max(2.0 * tol / gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    /// Zero-based sample indices with `|λ_i| > sv_tol`, ascending.
    pub indices: Vec<usize>,
    pub lambdas: Vec<f64>,
    /// `y_i(⟨w, x_i⟩ + b)` for each support index.
    pub margins: Vec<f64>,
    pub sv_tol: f64,
    /// Verdict of the point the set was extracted from, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<Verdict>,
}

impl SupportSet {
    pub fn with_source(mut self, verdict: Verdict) -> Self {
        self.source = Some(verdict);
        self
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn extract_support(
    point: &PrimalDualPoint,
    problem: &ProblemData,
    sv_tol: f64,
) -> Result<SupportSet> {
    ensure_len("lambda", problem.n_samples(), point.lambda.len())?;
    ensure_len("w", problem.n_features(), point.w.len())?;
    let margins_all = problem.a() * &point.w + problem.y() * point.b;
    let indices: Vec<usize> = (0..problem.n_samples())
        .filter(|&i| point.lambda[i].abs() > sv_tol)
        .collect();
    Ok(SupportSet {
        lambdas: indices.iter().map(|&i| point.lambda[i]).collect(),
        margins: indices.iter().map(|&i| margins_all[i]).collect(),
        indices,
        sv_tol,
        source: None,
    })
}

/// `w = −Aᵀλ`.
pub fn reconstruct_w(lambda: &DVector<f64>, problem: &ProblemData) -> Result<DVector<f64>> {
    ensure_len("lambda", problem.n_samples(), lambda.len())?;
    Ok(-(problem.a().transpose() * lambda))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneCheck {
    pub holds: bool,
    /// `max_{i ∈ J} |u_i|`, 0 for an empty support set.
    pub max_margin_deviation: f64,
    /// Whether the point itself passed P-stationarity at `tol`.
    pub certified: bool,
    pub support: SupportSet,
}

/// Checks that every support vector lies on a support hyperplane, i.e.
/// `|u_i| ≤ 10·tol` for `i ∈ J`, with `J` cut at [`support_threshold`].
/// Requires `γC ≥ 2`.
///
/// The P-stationarity of the point is reported in `certified` but not
/// enforced; the conclusion only means something when it is true.
pub fn verify_support_hyperplanes(
    point: &PrimalDualPoint,
    problem: &ProblemData,
    c: f64,
    gamma: f64,
    tol: f64,
) -> Result<HyperplaneCheck> {
    let gamma_c = gamma * c;
    if gamma_c < 2.0 {
        return Err(Error::RegimeMismatch { gamma_c });
    }
    let certificate = check_pstationary(point, problem, c, gamma, tol)?;
    ensure_len("u", problem.n_samples(), point.u.len())?;
    let support = extract_support(point, problem, support_threshold(gamma, tol))?
        .with_source(certificate.verdict);
    let max_margin_deviation = support
        .indices
        .iter()
        .map(|&i| point.u[i].abs())
        .fold(0.0, f64::max);
    Ok(HyperplaneCheck {
        holds: max_margin_deviation <= 10.0 * tol,
        max_margin_deviation,
        certified: certificate.is_pstationary(),
        support,
    })
}
