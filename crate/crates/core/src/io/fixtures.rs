//! Small datasets with known answers.

use crate::problem::Dataset;

/// Penalty at which [`counterexample`] has a KKT point that is not P-stationary.
pub const COUNTEREXAMPLE_C: f64 = 0.25;
pub const COUNTEREXAMPLE_W: [f64; 2] = [0.5, 0.5];
pub const COUNTEREXAMPLE_B: f64 = -2.0;
pub const COUNTEREXAMPLE_LAMBDA: [f64; 3] = [-0.25, 0.0, -0.25];
pub const COUNTEREXAMPLE_GAMMAS: [f64; 4] = [0.4, 4.0, 8.0, 16.0];

/// Positives `(3, 3)`, `(6, −2)` and negative `(1, 1)`.
///
/// At `C = 0.25` the point `w = (0.5, 0.5)`, `b = −2`, `u = (0, 1, 0)` with
/// `λ = (−0.25, 0, −0.25)` satisfies the KKT system, but sample 2 sits at
/// the kink `u = 1` with `λ = 0`, which no prox step can reproduce.
pub fn counterexample() -> Dataset {
    Dataset::new(
        vec![vec![3.0, 3.0], vec![6.0, -2.0], vec![1.0, 1.0]],
        vec![1.0, 1.0, -1.0],
    )
    .expect("valid fixture")
}

/// One positive sample `x = 2`. Optimum `w = 0`, `b = 1`, objective 0.
pub fn single_sample() -> Dataset {
    Dataset::new(vec![vec![2.0]], vec![1.0]).expect("valid fixture")
}

/// `x = 1` labeled `+1` and `x = −1` labeled `−1`. At `C = 1` the point
/// `w = 1`, `b = 0` with `λ = (−0.5, −0.5)` is P-stationary for `γ = 2`.
pub fn symmetric_pair() -> Dataset {
    Dataset::new(vec![vec![1.0], vec![-1.0]], vec![1.0, -1.0]).expect("valid fixture")
}
