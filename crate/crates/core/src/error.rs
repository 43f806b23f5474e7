use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("log-gamma domain error: argument {0} is not positive")]
    Domain(f64),

    #[error("matrix is not positive definite (pivot {index} = {pivot})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("degenerate column {0}: zero spread")]
    DegenerateColumn(usize),

    #[error("degenerate regressor column: zero norm")]
    DegenerateRegressor,

    #[error("every column (or column pair) is degenerate; nothing to test")]
    AllDegenerate,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("method {method} does not apply to {scenario} scenarios")]
    UnsupportedMethod { method: String, scenario: String },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
