//! Exact proximal operator of the scalar ramp loss,
//!
//! ```text
//! prox(s) = argmin_v  C·ℓ_r(v) + (v − s)² / (2γ),
//! ```
//!
//! its componentwise vector form, and a brute-force grid oracle.
//!
//! The operator is set-valued: at one threshold per regime two minimizers tie
//! and both are returned. Which closed form applies depends only on `γC`:
//! below 2 the minimizer can land on the linear piece (`s − γC`), at or above
//! 2 it jumps straight from 0 to `s`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::exec::Execution;
use crate::ramp::ramp_unchecked;

/// Step size `γ` and penalty `C`, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxParams {
    pub gamma: f64,
    pub c: f64,
}

impl ProxParams {
    pub fn new(gamma: f64, c: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "C must be positive, got {c}"
            )));
        }
        Ok(Self { gamma, c })
    }

    #[inline]
    pub fn gamma_c(&self) -> f64 {
        self.gamma * self.c
    }

    /// True when the `γC ≥ 2` closed form applies.
    pub fn is_large_step(&self) -> bool {
        self.gamma_c() >= 2.0
    }

    /// The input at which two minimizers tie: `1 + γC/2` or `√(2γC)`.
    pub fn tie_point(&self) -> f64 {
        tie_point(self.gamma_c())
    }
}

fn tie_point(gamma_c: f64) -> f64 {
    if gamma_c < 2.0 {
        1.0 + gamma_c / 2.0
    } else {
        (2.0 * gamma_c).sqrt()
    }
}

/// Which closed-form piece produced a minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxBranch {
    /// `v = s`
    Identity,
    /// `v = s − γC`
    Shift,
    /// `v = 0`
    Zero,
}

/// One or two minimizers of the scalar prox problem at input `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxSet {
    s: f64,
    gamma_c: f64,
    len: u8,
    branches: [ProxBranch; 2],
    values: [f64; 2],
}

impl ProxSet {
    fn single(s: f64, gamma_c: f64, branch: ProxBranch) -> Self {
        let v = branch_value(s, gamma_c, branch);
        Self {
            s,
            gamma_c,
            len: 1,
            branches: [branch, branch],
            values: [v, v],
        }
    }

    fn tie(s: f64, gamma_c: f64, first: ProxBranch, second: ProxBranch) -> Self {
        Self {
            s,
            gamma_c,
            len: 2,
            branches: [first, second],
            values: [
                branch_value(s, gamma_c, first),
                branch_value(s, gamma_c, second),
            ],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values[..self.len as usize]
    }

    pub fn branches(&self) -> &[ProxBranch] {
        &self.branches[..self.len as usize]
    }

    pub fn is_tie(&self) -> bool {
        self.len == 2
    }

    /// The first listed minimizer (`s` at ties), used for deterministic selection.
    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn input(&self) -> f64 {
        self.s
    }

    pub fn contains(&self, v: f64) -> bool {
        self.values().contains(&v)
    }

    /// `min_k |u − v_k|` over the members.
    ///
    /// Each distance is formed from `u − s` before adding the branch offset,
    /// so a point that equals a member analytically is not pushed off it by
    /// the rounding in `s − γC`.
    pub fn distance(&self, u: f64) -> f64 {
        self.branches()
            .iter()
            .map(|b| match b {
                ProxBranch::Identity => (u - self.s).abs(),
                ProxBranch::Shift => ((u - self.s) + self.gamma_c).abs(),
                ProxBranch::Zero => u.abs(),
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl Serialize for ProxSet {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("ProxSet", 3)?;
        st.serialize_field("values", self.values())?;
        st.serialize_field("branches", self.branches())?;
        st.serialize_field("tie", &self.is_tie())?;
        st.end()
    }
}

#[inline]
fn branch_value(s: f64, gamma_c: f64, branch: ProxBranch) -> f64 {
    match branch {
        ProxBranch::Identity => s,
        ProxBranch::Shift => s - gamma_c,
        ProxBranch::Zero => 0.0,
    }
}

/// Closed form for `0 < γC < 2`. Does not check the regime, so it can be
/// compared against [`prox_large_step`] at the shared boundary `γC = 2`.
pub fn prox_small_step(s: f64, gamma_c: f64) -> ProxSet {
    let threshold = 1.0 + gamma_c / 2.0;
    if s > threshold {
        ProxSet::single(s, gamma_c, ProxBranch::Identity)
    } else if s == threshold {
        ProxSet::tie(s, gamma_c, ProxBranch::Identity, ProxBranch::Shift)
    } else if s >= gamma_c {
        ProxSet::single(s, gamma_c, ProxBranch::Shift)
    } else if s > 0.0 {
        ProxSet::single(s, gamma_c, ProxBranch::Zero)
    } else {
        ProxSet::single(s, gamma_c, ProxBranch::Identity)
    }
}

/// Closed form for `γC ≥ 2`. Does not check the regime.
pub fn prox_large_step(s: f64, gamma_c: f64) -> ProxSet {
    let threshold = (2.0 * gamma_c).sqrt();
    if s > threshold {
        ProxSet::single(s, gamma_c, ProxBranch::Identity)
    } else if s == threshold {
        ProxSet::tie(s, gamma_c, ProxBranch::Identity, ProxBranch::Zero)
    } else if s > 0.0 {
        ProxSet::single(s, gamma_c, ProxBranch::Zero)
    } else {
        ProxSet::single(s, gamma_c, ProxBranch::Identity)
    }
}

/// Scalar prox of `γC·ℓ_r` at `s`.
pub fn prox_scalar(s: f64, params: ProxParams) -> Result<ProxSet> {
    ensure_finite(s, "prox input")?;
    Ok(prox_unchecked(s, params.gamma_c()))
}

#[inline]
pub(crate) fn prox_unchecked(s: f64, gamma_c: f64) -> ProxSet {
    if gamma_c < 2.0 {
        prox_small_step(s, gamma_c)
    } else {
        prox_large_step(s, gamma_c)
    }
}

const PARALLEL_MIN_LEN: usize = 1 << 14;

/// Componentwise prox of `γC·L_r`.
pub fn prox_vector(s: &[f64], params: ProxParams) -> Result<Vec<ProxSet>> {
    prox_vector_with(s, params, Execution::default())
}

/// [`prox_vector`] with an explicit execution strategy. Short vectors always
/// run sequentially.
pub fn prox_vector_with(s: &[f64], params: ProxParams, exec: Execution) -> Result<Vec<ProxSet>> {
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("prox input"));
    }
    let gc = params.gamma_c();
    let exec = if s.len() < PARALLEL_MIN_LEN {
        Execution::Sequential
    } else {
        exec
    };
    Ok(exec.map_indices(s.len(), |i| prox_unchecked(s[i], gc)))
}

/// `C·ℓ_r(v) + (v − s)² / (2γ)`.
#[inline]
pub fn prox_objective(v: f64, s: f64, params: ProxParams) -> f64 {
    let d = v - s;
    params.c * ramp_unchecked(v) + d * d / (2.0 * params.gamma)
}

/// Grid spacing of [`prox_oracle`].
pub const ORACLE_STEP: f64 = 1e-4;

/// Brute-force minimizer of the prox objective.
///
/// Scans the candidates `{s, s − γC, 0}` and a uniform grid with spacing
/// [`ORACLE_STEP`] on `[min(s, −1) − 1, max(s, 2) + 1]`, returning the point
/// with the smallest objective. Candidates win ties against grid points.
pub fn prox_oracle(s: f64, params: ProxParams) -> Result<f64> {
    prox_oracle_with(s, params, Execution::default())
}

pub fn prox_oracle_with(s: f64, params: ProxParams, exec: Execution) -> Result<f64> {
    ensure_finite(s, "prox oracle input")?;
    let lo = s.min(-1.0) - 1.0;
    let hi = s.max(2.0) + 1.0;
    let count = ((hi - lo) / ORACLE_STEP).floor() as usize + 1;

    // Scan in blocks so each parallel task has a useful amount of work.
    const BLOCK: usize = 4096;
    let blocks = count.div_ceil(BLOCK);
    let best_grid = exec.fold_indices(
        blocks,
        || (f64::INFINITY, usize::MAX),
        |mut acc, blk| {
            let end = ((blk + 1) * BLOCK).min(count);
            for k in blk * BLOCK..end {
                let v = lo + k as f64 * ORACLE_STEP;
                let f = prox_objective(v, s, params);
                if f < acc.0 || (f == acc.0 && k < acc.1) {
                    acc = (f, k);
                }
            }
            acc
        },
        |a, b| {
            if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        },
    );

    let mut best_v = lo + best_grid.1 as f64 * ORACLE_STEP;
    let mut best_f = best_grid.0;
    for v in [s, s - params.gamma_c(), 0.0] {
        let f = prox_objective(v, s, params);
        if f <= best_f {
            best_f = f;
            best_v = v;
        }
    }
    Ok(best_v)
}
