//! Dataset files, embedded fixtures, synthetic data and JSON reports.

pub mod fixtures;
mod format;
mod report;
mod synth;

pub use format::{parse_dataset, parse_dataset_str, write_dataset, DataFormat};
pub use report::{inputs_digest, ProblemSummary, Report};
pub use synth::{gen_synthetic, SyntheticConfig, SyntheticData};
