use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("sample {index} has {found} features, expected {expected}")]
    RaggedSample {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("label {0} is not -1 or +1")]
    InvalidLabel(f64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("B = [A y] is not full column rank; H and lambda_H are undefined")]
    RankDeficient,

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("gamma*C = {gamma_c} is below 2; the support-hyperplane check needs gamma*C >= 2")]
    RegimeMismatch { gamma_c: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NotPositiveDefinite | Error::RankDeficient)
    }
}

pub(crate) fn ensure_finite(x: f64, what: &'static str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn ensure_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
