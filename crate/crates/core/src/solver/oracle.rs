//! Exhaustive grid minimization of `f_r(w; b)` for `n ≤ 2`, used as a
//! reference global minimizer on tiny instances.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::problem::ProblemData;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Search box `[lo, hi]` applied to every coordinate of `(w, b)`.
    pub bounds: (f64, f64),
    pub coarse_step: f64,
    /// Number of 10× grid refinements around each incumbent.
    pub refine_levels: usize,
    /// Distinct coarse incumbents that get refined.
    pub starts: usize,
    /// Extra `(w…, b)` points refined alongside the coarse incumbents.
    pub seeds: Vec<Vec<f64>>,
    pub execution: Execution,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            bounds: (-4.0, 4.0),
            coarse_step: 0.05,
            refine_levels: 5,
            starts: 8,
            seeds: Vec::new(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    #[serde(with = "crate::serde_dvec")]
    pub w: DVector<f64>,
    pub b: f64,
    pub objective: f64,
    pub evaluations: usize,
}

const MAX_DIM: usize = 3;
const CANDIDATE_POOL: usize = 256;
const MAX_RECENTER: usize = 200;

/// Coarse scan of the box followed by `refine_levels` rounds of 10×
/// refinement around the best few coarse points (and any seeds).
///
/// Within a level the window is re-centered while the incumbent sits on its
/// edge, so the refinement can walk out of the initial coarse cell. Exact
/// ties in the objective go to the point whose slacks are farthest from the
/// kinks `{0, 1}`. Each refined point is then polished by solving the
/// equality-constrained quadratic of its active pattern exactly; the polish
/// is kept only when it lowers the objective.
pub fn global_oracle(problem: &ProblemData, c: f64, config: &OracleConfig) -> Result<OracleResult> {
    let n = problem.n_features();
    if n > 2 {
        return Err(Error::InvalidParameter(format!(
            "global oracle supports n <= 2, got n = {n}"
        )));
    }
    let (lo, hi) = config.bounds;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(
            "oracle bounds must be a finite interval".into(),
        ));
    }
    if config.coarse_step.is_nan() || config.coarse_step <= 0.0 || c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidParameter(
            "coarse step and C must be positive".into(),
        ));
    }
    for seed in &config.seeds {
        if seed.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                context: "oracle seed",
                expected: n + 1,
                found: seed.len(),
            });
        }
    }

    let dim = n + 1;
    let per_axis = ((hi - lo) / config.coarse_step).floor() as usize + 1;
    let total = per_axis.pow(dim as u32);
    let eval = |x: &[f64]| problem.objective_unchecked(&x[..n], x[n], c);

    let coord = |idx: usize| -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        let mut rest = idx;
        for slot in out.iter_mut().take(dim) {
            *slot = lo + (rest % per_axis) as f64 * config.coarse_step;
            rest /= per_axis;
        }
        out
    };

    // Coarse scan keeps the CANDIDATE_POOL best (value, index) pairs.
    let rows = total.div_ceil(per_axis);
    let pool = config.execution.fold_indices(
        rows,
        Vec::new,
        |mut acc: Vec<(f64, usize)>, row| {
            for idx in row * per_axis..((row + 1) * per_axis).min(total) {
                let f = eval(&coord(idx)[..dim]);
                push_best(&mut acc, (f, idx));
            }
            acc
        },
        |mut a, b| {
            for item in b {
                push_best(&mut a, item);
            }
            a
        },
    );

    // Greedy diverse starts: at least three coarse cells apart.
    let mut starts: Vec<[f64; MAX_DIM]> = Vec::new();
    for &(_, idx) in &pool {
        if starts.len() >= config.starts.max(1) {
            break;
        }
        let p = coord(idx);
        let far = starts.iter().all(|q| {
            (0..dim).map(|k| (p[k] - q[k]).abs()).fold(0.0, f64::max) >= 3.0 * config.coarse_step
        });
        if far {
            starts.push(p);
        }
    }
    for seed in &config.seeds {
        let mut p = [0.0; MAX_DIM];
        p[..dim].copy_from_slice(seed);
        starts.push(p);
    }

    let mut evaluations = total;
    // Tie-breaking never leaves the box, so flat regions cannot drag the
    // refinement outward.
    let clearance = |x: &[f64]| {
        if x[..dim].iter().all(|&v| (lo..=hi).contains(&v)) {
            kink_clearance(problem, &x[..dim])
        } else {
            f64::NEG_INFINITY
        }
    };
    let refined = config.execution.map_indices(starts.len(), |k| {
        let (x, f, evals) = refine(
            &eval,
            &clearance,
            starts[k],
            dim,
            config.coarse_step,
            config.refine_levels,
        );
        let (x, f) = polish(problem, c, x, f);
        (x, f, evals)
    });
    let mut best: Option<([f64; MAX_DIM], f64)> = None;
    for (x, f, evals) in refined {
        evaluations += evals;
        let better = match best {
            None => true,
            Some((bx, bf)) => f < bf || (f == bf && clearance(&x) > clearance(&bx)),
        };
        if better {
            best = Some((x, f));
        }
    }
    let (x, objective) = best.expect("at least one start");
    Ok(OracleResult {
        w: DVector::from_column_slice(&x[..n]),
        b: x[n],
        objective,
        evaluations,
    })
}

fn push_best(acc: &mut Vec<(f64, usize)>, item: (f64, usize)) {
    let key = |p: &(f64, usize)| (p.0, p.1);
    if acc.len() == CANDIDATE_POOL {
        let last = acc[CANDIDATE_POOL - 1];
        if key(&item).0 > key(&last).0 || (item.0 == last.0 && item.1 > last.1) {
            return;
        }
    }
    let pos = acc.partition_point(|p| p.0 < item.0 || (p.0 == item.0 && p.1 < item.1));
    acc.insert(pos, item);
    acc.truncate(CANDIDATE_POOL);
}

/// `min_i min(|u_i|, |u_i − 1|)` at `x = (w…, b)`.
fn kink_clearance(problem: &ProblemData, x: &[f64]) -> f64 {
    let n = x.len() - 1;
    problem
        .slack_unchecked(&x[..n], x[n])
        .iter()
        .map(|&u| u.abs().min((u - 1.0).abs()))
        .fold(f64::INFINITY, f64::min)
}

const POLISH_SNAPS: [f64; 4] = [1e-10, 1e-7, 1e-4, 1e-2];

/// Minimizes `½‖w‖² + C·Σ_{0<u_i<1} u_i` subject to `u_i = 0` / `u_i = 1` on
/// the samples within `snap` of a kink, for several snaps, and returns the
/// best point found (the input if nothing improves).
fn polish(problem: &ProblemData, c: f64, x: [f64; MAX_DIM], f: f64) -> ([f64; MAX_DIM], f64) {
    let n = problem.n_features();
    let dim = n + 1;
    let bm = problem.b();
    let u = problem.slack_unchecked(&x[..n], x[n]);
    let mut best = (x, f);
    for snap in POLISH_SNAPS {
        let mut rows = Vec::new();
        let mut grad = DVector::<f64>::zeros(dim);
        for (i, &ui) in u.iter().enumerate() {
            if ui.abs() <= snap {
                rows.push((i, 1.0));
            } else if (ui - 1.0).abs() <= snap {
                rows.push((i, 0.0));
            } else if ui > 0.0 && ui < 1.0 {
                grad += c * bm.row(i).transpose();
            }
        }
        let k = rows.len();
        let mut kkt = DMatrix::<f64>::zeros(dim + k, dim + k);
        let mut rhs = DVector::<f64>::zeros(dim + k);
        for j in 0..n {
            kkt[(j, j)] = 1.0;
        }
        rhs.rows_mut(0, dim).copy_from(&grad);
        for (r, &(i, target)) in rows.iter().enumerate() {
            for j in 0..dim {
                kkt[(dim + r, j)] = bm[(i, j)];
                kkt[(j, dim + r)] = bm[(i, j)];
            }
            rhs[dim + r] = target;
        }
        let Ok((sol, residual)) = crate::linalg::min_norm_lstsq(&kkt, &rhs) else {
            continue;
        };
        if residual.is_nan()
            || residual > 1e-9 * (1.0 + rhs.norm())
            || sol.iter().any(|v| !v.is_finite())
        {
            continue;
        }
        let mut cand = [0.0; MAX_DIM];
        cand[..dim].copy_from_slice(&sol.as_slice()[..dim]);
        let fc = problem.objective_unchecked(&cand[..n], cand[n], c);
        if fc < best.1 {
            best = (cand, fc);
        }
    }
    best
}

fn refine<F, G>(
    eval: &F,
    clearance: &G,
    start: [f64; MAX_DIM],
    dim: usize,
    coarse: f64,
    levels: usize,
) -> ([f64; MAX_DIM], f64, usize)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    const HALF: i64 = 10;
    let mut center = start;
    let mut best = eval(&center[..dim]);
    let mut evals = 1;
    let mut step = coarse;
    for _ in 0..levels {
        step /= 10.0;
        for _ in 0..MAX_RECENTER {
            let side = (2 * HALF + 1) as usize;
            let count = side.pow(dim as u32);
            let mut offsets_best = [0i64; MAX_DIM];
            let mut best_clear = clearance(&center[..dim]);
            for idx in 0..count {
                let mut rest = idx;
                let mut x = center;
                let mut off = [0i64; MAX_DIM];
                for k in 0..dim {
                    off[k] = (rest % side) as i64 - HALF;
                    rest /= side;
                    x[k] = center[k] + off[k] as f64 * step;
                }
                let f = eval(&x[..dim]);
                if f < best {
                    best = f;
                    offsets_best = off;
                    best_clear = f64::NAN;
                } else if f == best {
                    if best_clear.is_nan() {
                        let mut bx = center;
                        for j in 0..dim {
                            bx[j] += offsets_best[j] as f64 * step;
                        }
                        best_clear = clearance(&bx[..dim]);
                    }
                    let cl = clearance(&x[..dim]);
                    if cl > best_clear {
                        offsets_best = off;
                        best_clear = cl;
                    }
                }
            }
            evals += count;
            let mut on_edge = false;
            for k in 0..dim {
                center[k] += offsets_best[k] as f64 * step;
                on_edge |= offsets_best[k].abs() == HALF;
            }
            if !on_edge {
                break;
            }
        }
    }
    (center, best, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;

    #[test]
    fn single_sample_optimum_is_zero() {
        let p = ProblemData::build(&fixtures::single_sample()).unwrap();
        let cfg = OracleConfig {
            bounds: (-3.0, 3.0),
            ..OracleConfig::default()
        };
        let r = global_oracle(&p, 1.0, &cfg).unwrap();
        assert!(r.objective.abs() < 1e-6);
    }

    #[test]
    fn symmetric_pair_optimum() {
        let p = ProblemData::build(&fixtures::symmetric_pair()).unwrap();
        let r = global_oracle(&p, 1.0, &OracleConfig::default()).unwrap();
        assert!((r.objective - 0.5).abs() < 1e-4, "{r:?}");
        assert!((r.w[0] - 1.0).abs() < 1e-3 && r.b.abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn counterexample_bounded_by_kkt_point() {
        let p = ProblemData::build(&fixtures::counterexample()).unwrap();
        let r = global_oracle(&p, 0.25, &OracleConfig::default()).unwrap();
        assert!(r.objective <= 0.5);
    }

    #[test]
    fn strategies_agree() {
        let p = ProblemData::build(&fixtures::counterexample()).unwrap();
        let mut cfg = OracleConfig {
            coarse_step: 0.2,
            refine_levels: 2,
            ..OracleConfig::default()
        };
        cfg.execution = Execution::Sequential;
        let a = global_oracle(&p, 0.25, &cfg).unwrap();
        cfg.execution = Execution::Parallel;
        let b = global_oracle(&p, 0.25, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_wide_problems() {
        let d = crate::problem::Dataset::new(vec![vec![1.0, 2.0, 3.0]], vec![1.0]).unwrap();
        let p = ProblemData::build(&d).unwrap();
        assert!(global_oracle(&p, 1.0, &OracleConfig::default()).is_err());
    }
}
