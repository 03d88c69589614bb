use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Every predictor value is equal, so no pairwise slope is defined.
    #[error("predictor is constant; no slope is defined")]
    ConstantPredictor,

    /// A dependence measure received a vector with zero spread.
    #[error("input vector is constant")]
    ConstantInput,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    /// A residual column collapsed to a constant during the ordering search.
    /// `round` is 1-based, `variable` is a 0-based column index.
    #[error("degenerate data in round {round}: residual of X{} is constant", .variable + 1)]
    DegenerateData { round: usize, variable: usize },

    #[error("design matrix is numerically rank deficient for X{}", .variable + 1)]
    SingularDesign { variable: usize },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by the numbers rather than by malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ConstantPredictor
                | Error::ConstantInput
                | Error::DegenerateData { .. }
                | Error::SingularDesign { .. }
        )
    }
}
