//! Certificates for candidate points of
//!
//! ```text
//! min ½‖w‖² + C·L_r(u)   s.t.   u + A w + b y = 1.
//! ```
//!
//! A point `(w, b, u)` with multiplier `λ` is P-stationary for step `γ` when
//!
//! ```text
//! w + Aᵀλ = 0,   ⟨y, λ⟩ = 0,   u + A w + b y = 1,   u ∈ prox_{γC L_r}(u − γλ),
//! ```
//!
//! and a KKT point when the last line is replaced by `0 ∈ C ∂L_r(u) + λ`.
//! P-stationarity implies KKT; the converse fails (see
//! [`crate::io::fixtures::counterexample`]).

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_len, Error, Result};
use crate::linalg::min_norm_lstsq;
use crate::problem::ProblemData;
use crate::prox::{prox_unchecked, ProxParams};
use crate::ramp::SubdiffInterval;

pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualPoint {
    #[serde(with = "crate::serde_dvec")]
    pub w: DVector<f64>,
    pub b: f64,
    #[serde(with = "crate::serde_dvec")]
    pub u: DVector<f64>,
    #[serde(with = "crate::serde_dvec")]
    pub lambda: DVector<f64>,
}

impl PrimalDualPoint {
    /// Builds a point whose `u` satisfies the equality constraint exactly.
    pub fn from_primal(
        problem: &ProblemData,
        w: DVector<f64>,
        b: f64,
        lambda: DVector<f64>,
    ) -> Result<Self> {
        let u = problem.slack(&w, b)?;
        Ok(Self { w, b, u, lambda })
    }

    fn check_dims(&self, problem: &ProblemData) -> Result<()> {
        ensure_len("w", problem.n_features(), self.w.len())?;
        ensure_len("u", problem.n_samples(), self.u.len())?;
        ensure_len("lambda", problem.n_samples(), self.lambda.len())?;
        ensure_finite(self.b, "bias")?;
        if self
            .w
            .iter()
            .chain(self.u.iter())
            .chain(self.lambda.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    PStationary,
    KktOnly,
    Neither,
}

/// The three equality residuals shared by both certificates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualityResiduals {
    /// `‖w + Aᵀλ‖∞`
    pub r_grad: f64,
    /// `|⟨y, λ⟩|`
    pub r_y: f64,
    /// `‖u + A w + b y − 1‖∞`
    pub r_feas: f64,
}

impl EqualityResiduals {
    fn compute(point: &PrimalDualPoint, problem: &ProblemData) -> Self {
        let a = problem.a();
        let y = problem.y();
        let r_grad = (&point.w + a.transpose() * &point.lambda).amax();
        let r_y = y.dot(&point.lambda).abs();
        let r_feas = (&point.u + a * &point.w + y * point.b)
            .add_scalar(-1.0)
            .amax();
        Self {
            r_grad,
            r_y,
            r_feas,
        }
    }

    pub fn max(&self) -> f64 {
        self.r_grad.max(self.r_y).max(self.r_feas)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub holds: bool,
    pub tol: f64,
    #[serde(flatten)]
    pub equality: EqualityResiduals,
    /// `max_i dist(λ_i, I_i)` for the multiplier intervals `I_i`.
    pub r_subdiff: f64,
    pub subdiff_residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub gamma: f64,
    pub c: f64,
    pub tol: f64,
    #[serde(flatten)]
    pub equality: EqualityResiduals,
    /// `max_i dist(u_i, prox(u_i − γλ_i))`.
    pub r_prox: f64,
    pub prox_residuals: Vec<f64>,
    pub kkt: KktReport,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn max_residual(&self) -> f64 {
        self.equality.max().max(self.r_prox)
    }

    pub fn is_pstationary(&self) -> bool {
        self.verdict == Verdict::PStationary
    }
}

fn positive(value: f64, name: &str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {value}"
        )))
    }
}

/// Interval that `0 ∈ C ∂ℓ_r(u) + λ` prescribes for `λ`:
/// `[−C, 0]` at the kinks `u ∈ {0, 1}`, `{−C}` on `(0, 1)`, `{0}` elsewhere.
/// `u` within `snap` of a kink is treated as on it.
pub fn multiplier_interval(u: f64, c: f64, snap: f64) -> SubdiffInterval {
    if u.abs() <= snap || (u - 1.0).abs() <= snap {
        SubdiffInterval { lo: -c, hi: 0.0 }
    } else if u > 0.0 && u < 1.0 {
        SubdiffInterval::point(-c)
    } else {
        SubdiffInterval::point(0.0)
    }
}

/// KKT conditions at tolerance `tol`.
pub fn check_kkt(
    point: &PrimalDualPoint,
    problem: &ProblemData,
    c: f64,
    tol: f64,
) -> Result<KktReport> {
    positive(c, "C")?;
    positive(tol, "tol")?;
    point.check_dims(problem)?;
    Ok(kkt_unchecked(point, problem, c, tol))
}

fn kkt_unchecked(point: &PrimalDualPoint, problem: &ProblemData, c: f64, tol: f64) -> KktReport {
    let equality = EqualityResiduals::compute(point, problem);
    let subdiff_residuals: Vec<f64> = point
        .u
        .iter()
        .zip(point.lambda.iter())
        .map(|(&u, &l)| multiplier_interval(u, c, tol).distance(l))
        .collect();
    let r_subdiff = subdiff_residuals.iter().cloned().fold(0.0, f64::max);
    KktReport {
        holds: equality.max() <= tol && r_subdiff <= tol,
        tol,
        equality,
        r_subdiff,
        subdiff_residuals,
    }
}

/// P-stationarity residuals at step `gamma`. The verdict is
/// [`Verdict::PStationary`] when every residual is within `tol`, otherwise
/// [`Verdict::KktOnly`] or [`Verdict::Neither`] depending on the KKT check
/// at the same tolerance.
pub fn check_pstationary(
    point: &PrimalDualPoint,
    problem: &ProblemData,
    c: f64,
    gamma: f64,
    tol: f64,
) -> Result<Certificate> {
    let params = ProxParams::new(gamma, c)?;
    positive(tol, "tol")?;
    point.check_dims(problem)?;

    let equality = EqualityResiduals::compute(point, problem);
    let gc = params.gamma_c();
    let prox_residuals: Vec<f64> = point
        .u
        .iter()
        .zip(point.lambda.iter())
        .map(|(&u, &l)| prox_unchecked(u - gamma * l, gc).distance(u))
        .collect();
    let r_prox = prox_residuals.iter().cloned().fold(0.0, f64::max);
    let kkt = kkt_unchecked(point, problem, c, tol);

    let verdict = if equality.max().max(r_prox) <= tol {
        Verdict::PStationary
    } else if kkt.holds {
        Verdict::KktOnly
    } else {
        Verdict::Neither
    };
    Ok(Certificate {
        gamma,
        c,
        tol,
        equality,
        r_prox,
        prox_residuals,
        kkt,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierEstimate {
    #[serde(with = "crate::serde_dvec")]
    pub lambda: DVector<f64>,
    /// `‖Bᵀλ − (−w; 0)‖₂`
    pub residual: f64,
}

/// Least-squares multiplier for a primal `w`: the minimum-norm solution of
/// `Aᵀλ = −w`, `yᵀλ = 0`.
pub fn estimate_multiplier(w: &DVector<f64>, problem: &ProblemData) -> Result<MultiplierEstimate> {
    ensure_len("w", problem.n_features(), w.len())?;
    let n = problem.n_features();
    let rhs = DVector::from_fn(n + 1, |i, _| if i < n { -w[i] } else { 0.0 });
    let (lambda, residual) = min_norm_lstsq(&problem.b().transpose(), &rhs)?;
    Ok(MultiplierEstimate { lambda, residual })
}

/// Multiplier consistent with the prox fixed-point structure at step `γ`.
///
/// Entries with `u_i` away from zero are pinned (`−C` on the shifted branch,
/// `0` where `u_i < 0` or on the identity branch); entries with `|u_i| ≤ snap`
/// are solved by least squares on `Bᵀλ = (−w; 0)` and clamped to the
/// admissible interval, `[−C, 0]` when `γC < 2` and `[−√(2C/γ), 0]` otherwise.
/// Points in the gaps no prox branch reaches get the KKT value.
pub fn estimate_multiplier_structured(
    w: &DVector<f64>,
    b: f64,
    problem: &ProblemData,
    c: f64,
    gamma: f64,
    snap: f64,
) -> Result<MultiplierEstimate> {
    positive(c, "C")?;
    positive(gamma, "gamma")?;
    ensure_finite(snap, "snap")?;
    let params = ProxParams::new(gamma, c)?;
    let u = problem.slack(w, b)?;
    let m = problem.n_samples();
    let n = problem.n_features();
    let kink_lo = if params.is_large_step() {
        -(2.0 * c / gamma).sqrt()
    } else {
        -c
    };
    let mut lambda = DVector::zeros(m);
    let mut free = Vec::new();
    for i in 0..m {
        if u[i].abs() <= snap {
            free.push(i);
        } else if u[i] > 0.0 && u[i] < 1.0 {
            lambda[i] = -c;
        }
    }
    let bt = problem.b().transpose();
    let rhs = DVector::from_fn(n + 1, |i, _| if i < n { -w[i] } else { 0.0 }) - &bt * &lambda;
    let reduced = bt.select_columns(free.iter());
    let (x, _) = min_norm_lstsq(&reduced, &rhs)?;
    for (k, &i) in free.iter().enumerate() {
        lambda[i] = x[k].clamp(kink_lo, 0.0);
    }
    let full_rhs = DVector::from_fn(n + 1, |i, _| if i < n { -w[i] } else { 0.0 });
    let residual = (&bt * &lambda - full_rhs).norm();
    Ok(MultiplierEstimate { lambda, residual })
}

/// Default probe steps: `0.5/λ_H` when `B` has full column rank, then `2/C`
/// and `4/C` (one step at the regime boundary, one inside the `γC ≥ 2` side).
pub fn default_gammas(problem: &ProblemData, c: f64) -> Vec<f64> {
    let mut gammas = Vec::with_capacity(3);
    if let Ok(lh) = problem.lambda_h() {
        if lh > 0.0 {
            gammas.push(0.5 / lh);
        }
    }
    gammas.push(2.0 / c);
    gammas.push(4.0 / c);
    gammas
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierSource {
    /// [`estimate_multiplier`]
    MinNorm,
    /// [`estimate_multiplier_structured`]
    Structured,
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grade {
    /// Point behind the best certificate.
    pub point: PrimalDualPoint,
    pub multiplier_residual: f64,
    pub multiplier_source: MultiplierSource,
    /// One certificate per probed `γ`, in input order.
    pub certificates: Vec<Certificate>,
    /// Index into `certificates` of the first passing `γ`, else the one with
    /// the smallest maximum residual.
    pub best: usize,
    pub verdict: Verdict,
}

impl Grade {
    pub fn best_certificate(&self) -> &Certificate {
        &self.certificates[self.best]
    }
}

struct Candidate {
    point: PrimalDualPoint,
    residual: f64,
    source: MultiplierSource,
    certificate: Certificate,
}

fn assemble(mut candidates: Vec<Candidate>) -> Grade {
    let best = candidates
        .iter()
        .position(|c| c.certificate.is_pstationary())
        .unwrap_or_else(|| {
            (0..candidates.len())
                .min_by(|&i, &j| {
                    candidates[i]
                        .certificate
                        .max_residual()
                        .total_cmp(&candidates[j].certificate.max_residual())
                })
                .unwrap_or(0)
        });
    let verdict = if candidates[best].certificate.is_pstationary() {
        Verdict::PStationary
    } else if candidates.iter().any(|c| c.certificate.kkt.holds) {
        Verdict::KktOnly
    } else {
        Verdict::Neither
    };
    let certificates = candidates.iter().map(|c| c.certificate.clone()).collect();
    let chosen = candidates.swap_remove(best);
    Grade {
        point: chosen.point,
        multiplier_residual: chosen.residual,
        multiplier_source: chosen.source,
        certificates,
        best,
        verdict,
    }
}

fn ranks_before(a: &Certificate, b: &Certificate) -> bool {
    match (a.is_pstationary(), b.is_pstationary()) {
        (true, false) => true,
        (false, true) => false,
        _ => a.max_residual() < b.max_residual(),
    }
}

/// Reconstructs `u` from the constraint and certifies the point at every
/// step in `gammas`. At each `γ` both the minimum-norm and the structured
/// multiplier (snapped at `tol`) are tried and the better certificate kept.
///
/// A non-P verdict only means no probed `γ` worked.
pub fn grade_point(
    w: &DVector<f64>,
    b: f64,
    problem: &ProblemData,
    c: f64,
    gammas: &[f64],
    tol: f64,
) -> Result<Grade> {
    if gammas.is_empty() {
        return Err(Error::InvalidParameter("gamma list is empty".into()));
    }
    let min_norm = estimate_multiplier(w, problem)?;
    let base = PrimalDualPoint::from_primal(problem, w.clone(), b, min_norm.lambda)?;
    let mut candidates = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let mut cand = Candidate {
            certificate: check_pstationary(&base, problem, c, gamma, tol)?,
            point: base.clone(),
            residual: min_norm.residual,
            source: MultiplierSource::MinNorm,
        };
        let structured = estimate_multiplier_structured(w, b, problem, c, gamma, tol)?;
        let point = PrimalDualPoint {
            lambda: structured.lambda,
            ..base.clone()
        };
        let certificate = check_pstationary(&point, problem, c, gamma, tol)?;
        if ranks_before(&certificate, &cand.certificate) {
            cand = Candidate {
                point,
                residual: structured.residual,
                source: MultiplierSource::Structured,
                certificate,
            };
        }
        candidates.push(cand);
    }
    Ok(assemble(candidates))
}

/// As [`grade_point`] with a caller-supplied multiplier.
pub fn grade_primal_dual(
    point: PrimalDualPoint,
    multiplier_residual: f64,
    problem: &ProblemData,
    c: f64,
    gammas: &[f64],
    tol: f64,
) -> Result<Grade> {
    if gammas.is_empty() {
        return Err(Error::InvalidParameter("gamma list is empty".into()));
    }
    let candidates = gammas
        .iter()
        .map(|&g| {
            Ok(Candidate {
                certificate: check_pstationary(&point, problem, c, g, tol)?,
                point: point.clone(),
                residual: multiplier_residual,
                source: MultiplierSource::Supplied,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(candidates))
}
