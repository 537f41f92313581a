//! Execution strategy for the data-parallel loops (grid scans, sweeps).
//!
//! With the `parallel` feature (default) the parallel strategy runs on the
//! rayon global pool. Without it, [`Execution::Parallel`] silently falls back
//! to the sequential path so callers never need `cfg` gates of their own.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether this strategy actually runs on the thread pool in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `f` over `0..len` and collects the results in index order.
    pub fn map_indices<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Folds `0..len` into per-chunk accumulators with `fold`, then merges
    /// them with `reduce`. `reduce` must be associative; no ordering
    /// between chunks is guaranteed in parallel mode.
    pub fn fold_indices<A, I, F, R>(self, len: usize, init: I, fold: F, reduce: R) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, usize) -> A + Sync + Send,
        R: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..len)
                .into_par_iter()
                .fold(&init, &fold)
                .reduce(&init, &reduce);
        }
        let _ = &reduce;
        (0..len).fold(init(), fold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_agree() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let squares = exec.map_indices(100, |i| i * i);
            assert_eq!(squares[7], 49);
            assert_eq!(squares.len(), 100);
            let total = exec.fold_indices(1000, || 0u64, |a, i| a + i as u64, |a, b| a + b);
            assert_eq!(total, 499_500);
        }
    }
}
