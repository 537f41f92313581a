use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Dataset;

/// `Csv`: `label,x1,…,xn` per line. `Libsvm`: `label idx:val …` with 1-based
/// ascending indices; absent indices are zero. Blank lines and lines starting
/// with `#` are skipped in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Libsvm,
}

impl FromStr for DataFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DataFormat::Csv),
            "libsvm" | "svmlight" => Ok(DataFormat::Libsvm),
            other => Err(format!(
                "unknown data format '{other}' (expected csv or libsvm)"
            )),
        }
    }
}

pub fn parse_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset_str(&text, format)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_label(token: &str, line: usize) -> Result<f64> {
    let y: f64 = token
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("label '{}' is not a number", token.trim())))?;
    if y == 1.0 || y == -1.0 {
        Ok(y)
    } else {
        Err(parse_err(line, format!("label {y} is not -1 or +1")))
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("'{}' is not a number", token.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, "non-finite feature value"))
    }
}

pub fn parse_dataset_str(text: &str, format: DataFormat) -> Result<Dataset> {
    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match format {
            DataFormat::Csv => {
                let mut fields = trimmed.split(',');
                let label = parse_label(fields.next().unwrap_or_default(), line)?;
                let row = fields
                    .map(|f| parse_value(f, line))
                    .collect::<Result<Vec<_>>>()?;
                match width {
                    None => width = Some(row.len()),
                    Some(w) if w != row.len() => {
                        return Err(parse_err(
                            line,
                            format!("expected {w} features, found {}", row.len()),
                        ));
                    }
                    _ => {}
                }
                features.push(row);
                labels.push(label);
            }
            DataFormat::Libsvm => {
                let mut tokens = trimmed.split_whitespace();
                let label = parse_label(tokens.next().unwrap_or_default(), line)?;
                let mut row: Vec<f64> = Vec::new();
                let mut last = 0usize;
                for tok in tokens {
                    let (idx, val) = tok
                        .split_once(':')
                        .ok_or_else(|| parse_err(line, format!("'{tok}' is not idx:value")))?;
                    let idx: usize = idx
                        .parse()
                        .map_err(|_| parse_err(line, format!("bad feature index '{idx}'")))?;
                    if idx == 0 {
                        return Err(parse_err(line, "feature indices are 1-based"));
                    }
                    if idx <= last {
                        return Err(parse_err(
                            line,
                            "feature indices must be strictly increasing",
                        ));
                    }
                    last = idx;
                    row.resize(idx, 0.0);
                    row[idx - 1] = parse_value(val, line)?;
                }
                features.push(row);
                labels.push(label);
            }
        }
    }

    if format == DataFormat::Libsvm {
        let n = features.iter().map(Vec::len).max().unwrap_or(0);
        for row in &mut features {
            row.resize(n, 0.0);
        }
    }
    Dataset::new(features, labels)
}

/// Serializes with 17 significant digits so parsing reproduces every value.
pub fn write_dataset(dataset: &Dataset, format: DataFormat) -> String {
    let mut out = String::new();
    for i in 0..dataset.n_samples() {
        let label = if dataset.label(i) > 0.0 { "+1" } else { "-1" };
        out.push_str(label);
        for (j, v) in dataset.sample(i).iter().enumerate() {
            match format {
                DataFormat::Csv => write!(out, ",{v:.16e}"),
                DataFormat::Libsvm => write!(out, " {}:{v:.16e}", j + 1),
            }
            .expect("write to string");
        }
        out.push('\n');
    }
    out
}
