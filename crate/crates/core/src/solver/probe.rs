use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::problem::ProblemData;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub base_objective: f64,
    pub min_perturbed_objective: f64,
    /// `base − min perturbed`; positive means some perturbation improved.
    pub max_decrease: f64,
    pub samples: usize,
    pub radius: f64,
}

/// Evaluates `f_r` at `samples` points drawn uniformly from the sphere of
/// the given radius around `(w, b)`.
pub fn probe_local_minimum(
    problem: &ProblemData,
    w: &DVector<f64>,
    b: f64,
    c: f64,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let base = problem.objective(w, b, c)?;
    let dim = w.len() + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut direction = vec![0.0; dim];
    let mut shifted = w.clone();
    let mut min_f = f64::INFINITY;
    for _ in 0..samples {
        for d in direction.iter_mut() {
            *d = StandardNormal.sample(&mut rng);
        }
        let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        for (k, s) in shifted.iter_mut().enumerate() {
            *s = w[k] + radius * direction[k] / norm;
        }
        let f = problem.objective_unchecked(
            shifted.as_slice(),
            b + radius * direction[dim - 1] / norm,
            c,
        );
        min_f = min_f.min(f);
    }
    Ok(ProbeReport {
        base_objective: base,
        min_perturbed_objective: min_f,
        max_decrease: base - min_f,
        samples,
        radius,
    })
}
