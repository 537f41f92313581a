//! Training and reference minimization for the ramp-loss SVM.

mod admm;
mod oracle;
mod probe;

pub use admm::{train_admm, train_sweep, SolveResult, SolveStatus, SolverConfig};
pub use oracle::{global_oracle, OracleConfig, OracleResult};
pub use probe::{probe_local_minimum, ProbeReport};

use crate::error::{ensure_len, Result};

/// `⟨w, x⟩ + b`.
pub fn decision_value(w: &[f64], b: f64, x: &[f64]) -> Result<f64> {
    ensure_len("predict input", w.len(), x.len())?;
    Ok(w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b)
}

/// Sign of the decision value, with `sign(0) = +1`.
pub fn predict(w: &[f64], b: f64, x: &[f64]) -> Result<i8> {
    Ok(if decision_value(w, b, x)? >= 0.0 {
        1
    } else {
        -1
    })
}
