//! Proximal ADMM on the constrained form
//! `min ½‖w‖² + C·L_r(u)  s.t.  u + A w + b y = 1`.
//!
//! Each sweep updates `u` by the exact ramp prox with step `γ = 1/σ`, then
//! `(w, b)` by one SPD solve, then the multiplier. A fixed point of the
//! sweep satisfies the P-stationarity system at that `γ`, so convergence is
//! declared by the P-stationarity residuals and nothing else.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::certify::{check_pstationary, Certificate, PrimalDualPoint};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::SpdFactor;
use crate::problem::ProblemData;
use crate::prox::prox_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub c: f64,
    /// Augmented-Lagrangian penalty; the prox step is `1/σ`.
    pub sigma: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Seed for the randomized diagnostics run on the result.
    pub seed: u64,
}

impl SolverConfig {
    /// Defaults: `σ = C/2` (so `γC = 2`), `tol = 1e-6`, 10 000 iterations.
    pub fn new(c: f64) -> Self {
        Self {
            c,
            sigma: c / 2.0,
            tol: 1e-6,
            max_iter: 10_000,
            seed: 0,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn gamma(&self) -> f64 {
        1.0 / self.sigma
    }

    pub fn gamma_c(&self) -> f64 {
        self.c / self.sigma
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("C", self.c), ("sigma", self.sigma), ("tol", self.tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub point: PrimalDualPoint,
    pub certificate: Certificate,
    pub iterations: usize,
    pub objective: f64,
    pub status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
}

struct State {
    w: DVector<f64>,
    b: f64,
    u: DVector<f64>,
    lambda: DVector<f64>,
}

impl State {
    fn initial(m: usize, n: usize) -> Self {
        Self {
            w: DVector::zeros(n),
            b: 0.0,
            u: DVector::from_element(m, 1.0),
            lambda: DVector::zeros(m),
        }
    }

    fn is_finite(&self) -> bool {
        self.b.is_finite()
            && self
                .w
                .iter()
                .chain(self.u.iter())
                .chain(self.lambda.iter())
                .all(|v| v.is_finite())
    }

    fn point(&self) -> PrimalDualPoint {
        PrimalDualPoint {
            w: self.w.clone(),
            b: self.b,
            u: self.u.clone(),
            lambda: self.lambda.clone(),
        }
    }
}

/// `[[I + σAᵀA, σAᵀy], [σyᵀA, σm]]`, which is `diag(I, 0) + σBᵀB`.
fn subproblem_matrix(problem: &ProblemData, sigma: f64) -> DMatrix<f64> {
    let n = problem.n_features();
    let b = problem.b();
    let mut k = b.transpose() * b * sigma;
    for i in 0..n {
        k[(i, i)] += 1.0;
    }
    k
}

pub fn train_admm(problem: &ProblemData, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let (m, n) = (problem.n_samples(), problem.n_features());
    let sigma = config.sigma;
    let gamma = config.gamma();
    let gc = config.gamma_c();
    let a = problem.a();
    let y = problem.y();
    let bt = problem.b().transpose();

    let mut state = State::initial(m, n);
    let factor = match SpdFactor::new(subproblem_matrix(problem, sigma)) {
        Ok(f) => f,
        Err(e) => {
            return finish(
                problem,
                config,
                state,
                0,
                SolveStatus::Diverged,
                Some(e.to_string()),
            )
        }
    };

    let mut s = DVector::zeros(m);
    for iter in 1..=config.max_iter {
        let previous = (
            state.w.clone(),
            state.b,
            state.u.clone(),
            state.lambda.clone(),
        );

        // u-update: prox at 1 − A w − b y − λ/σ, first member at ties.
        let margin = a * &state.w + y * state.b;
        for i in 0..m {
            s[i] = 1.0 - margin[i] - state.lambda[i] / sigma;
            state.u[i] = prox_unchecked(s[i], gc).first();
        }

        // (w, b)-update.
        let r = (&state.u + &state.lambda / sigma).add_scalar(-1.0);
        let rhs = &bt * &r * (-sigma);
        let wb = factor.solve(&rhs)?;
        state.w.copy_from(&wb.rows(0, n));
        state.b = wb[n];

        // Multiplier update.
        let feas = (&state.u + a * &state.w + y * state.b).add_scalar(-1.0);
        state.lambda += feas * sigma;

        if !state.is_finite() {
            state.w = previous.0;
            state.b = previous.1;
            state.u = previous.2;
            state.lambda = previous.3;
            let msg = format!("non-finite iterate at iteration {iter}");
            return finish(
                problem,
                config,
                state,
                iter,
                SolveStatus::Diverged,
                Some(msg),
            );
        }

        if quick_residual(problem, &state, gamma, gc) <= config.tol {
            let cert = check_pstationary(&state.point(), problem, config.c, gamma, config.tol)?;
            if cert.is_pstationary() {
                return finish(problem, config, state, iter, SolveStatus::Converged, None);
            }
        }
    }
    finish(
        problem,
        config,
        state,
        config.max_iter,
        SolveStatus::MaxIter,
        None,
    )
}

/// Same quantity as `Certificate::max_residual`, without allocating a report.
fn quick_residual(problem: &ProblemData, st: &State, gamma: f64, gc: f64) -> f64 {
    let a = problem.a();
    let y = problem.y();
    let grad = (&st.w + a.transpose() * &st.lambda).amax();
    let ortho = y.dot(&st.lambda).abs();
    let feas = (&st.u + a * &st.w + y * st.b).add_scalar(-1.0).amax();
    let prox =
        st.u.iter()
            .zip(st.lambda.iter())
            .map(|(&u, &l)| prox_unchecked(u - gamma * l, gc).distance(u))
            .fold(0.0, f64::max);
    grad.max(ortho).max(feas).max(prox)
}

fn finish(
    problem: &ProblemData,
    config: &SolverConfig,
    state: State,
    iterations: usize,
    status: SolveStatus,
    diagnostics: Option<String>,
) -> Result<SolveResult> {
    let point = state.point();
    let certificate = check_pstationary(&point, problem, config.c, config.gamma(), config.tol)?;
    let objective = problem.objective(&point.w, point.b, config.c)?;
    Ok(SolveResult {
        point,
        certificate,
        iterations,
        objective,
        status,
        diagnostics,
    })
}

/// Independent solver runs over shared data, e.g. a `σ` sweep.
pub fn train_sweep(
    problem: &ProblemData,
    configs: &[SolverConfig],
    exec: Execution,
) -> Vec<Result<SolveResult>> {
    exec.map_indices(configs.len(), |i| train_admm(problem, &configs[i]))
}
