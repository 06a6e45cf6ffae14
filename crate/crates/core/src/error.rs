use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    Dimension {
        context: &'static str,
        expected: String,
        found: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("data is not centered: column {column} of {block} has mean {mean:e}")]
    NotCentered {
        block: &'static str,
        column: usize,
        mean: f64,
    },
    #[error("non-finite value at row {row}, column {column} of {block}")]
    NonFinite {
        block: &'static str,
        row: usize,
        column: usize,
    },
    #[error("column {column} of {block} has zero variance")]
    ZeroVariance { block: &'static str, column: usize },
    #[error("{what} is not symmetric positive definite")]
    NotPositiveDefinite { what: &'static str },
    #[error("need at least q = {q} samples, got n = {n}")]
    TooFewSamples { n: usize, q: usize },
    #[error("objective became non-finite at outer iteration {iteration}")]
    NonFiniteObjective { iteration: usize },
    #[error("singular active-set system for degrees of freedom at lambda1 = {lambda1}, lambda2 = {lambda2}")]
    SingularDf { lambda1: f64, lambda2: f64 },
    #[error("fit failed at grid cell (lambda1 = {lambda1}, lambda2 = {lambda2}): {source}")]
    Cell {
        lambda1: f64,
        lambda2: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn dim(
        context: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::Dimension {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// Whether the error comes from numerical failure rather than bad configuration or I/O.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NotPositiveDefinite { .. }
            | Error::NonFiniteObjective { .. }
            | Error::SingularDf { .. } => true,
            Error::Cell { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
