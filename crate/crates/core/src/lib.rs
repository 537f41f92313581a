//! Ramp-loss support vector machines.
//!
//! - [`ramp`]: the loss `ℓ_r(t) = min(1, max(t, 0))`, its subdifferential and
//!   the primal objective.
//! - [`prox`]: the exact, set-valued proximal operator of `γC·ℓ_r` and a
//!   brute-force oracle for it.
//! - [`problem`]: datasets and the derived matrices `A`, `B = [A y]`, `B†`,
//!   `H`, `λ_H`.
//! - [`certify`]: P-stationarity and KKT certificates, multiplier recovery.
//! - [`solver`]: ADMM training, a grid-search global oracle for tiny
//!   problems, and prediction.
//! - [`support`]: support vectors and the support-hyperplane check.
//! - [`io`] and [`cli`]: file formats, fixtures, reports and the command line.
//!
//! Data-parallel loops go through [`exec::Execution`]; the `parallel` feature
//! (on by default) backs it with rayon.

pub mod certify;
pub mod cli;
pub mod error;
pub mod exec;
pub mod io;
pub mod linalg;
pub mod problem;
pub mod prox;
pub mod ramp;
mod serde_dvec;
pub mod solver;
pub mod support;

pub use certify::{Certificate, PrimalDualPoint, Verdict};
pub use error::{Error, Result};
pub use exec::Execution;
pub use problem::{Dataset, ProblemData};
pub use prox::{ProxParams, ProxSet};
