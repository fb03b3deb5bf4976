use std::path::PathBuf;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("column {column} has zero norm (1-based)")]
    ZeroColumn { column: usize },

    #[error("matrix is not symmetric: |a_ij - a_ji| = {deviation:e} exceeds {tolerance:e}")]
    Asymmetric { deviation: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration of {needed} subsets exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("no {s}-sparse solution fits the response")]
    NoSparseSolution { s: usize },

    #[error(
        "basis pursuit polish is infeasible (residual {residual:e} > {tolerance:e}); decrease lambda_min"
    )]
    InfeasibleAfterPolish { residual: f64, tolerance: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("selection sequences diverge at k = {k}: matrix picked {matrix}, analytic picked {analytic} (1-based)")]
    SelectionMismatch {
        k: usize,
        matrix: usize,
        analytic: usize,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
