use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::problem::ProblemData;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSummary {
    pub m: usize,
    pub n: usize,
    pub full_column_rank: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_h: Option<f64>,
}

impl ProblemSummary {
    pub fn of(problem: &ProblemData) -> Self {
        Self {
            m: problem.n_samples(),
            n: problem.n_features(),
            full_column_rank: problem.full_column_rank(),
            lambda_h: problem.lambda_h().ok(),
        }
    }
}

/// Top-level JSON document written by every CLI command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    /// SHA-256 over the command's inputs (file bytes and arguments).
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSummary>,
    pub result: serde_json::Value,
}

impl Report {
    pub fn new(command: &str, inputs_digest: String, result: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs_digest,
            seed: None,
            problem: None,
            result,
        }
    }

    pub fn with_problem(mut self, problem: &ProblemData) -> Self {
        self.problem = Some(ProblemSummary::of(problem));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Hex SHA-256 of the parts, each prefixed by its length.
pub fn inputs_digest<I, B>(parts: I) -> String
where
    I: IntoIterator<Item = B>,
    B: AsRef<[u8]>,
{
    let mut h = Sha256::new();
    for p in parts {
        let p = p.as_ref();
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_framed() {
        let a = inputs_digest(["ab", "c"]);
        assert_eq!(a, inputs_digest(["ab", "c"]));
        assert_ne!(a, inputs_digest(["a", "bc"]));
        assert_eq!(a.len(), 64);
    }
}
