use thiserror::Error;

/// Errors produced by the estimation and testing pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid distribution parameters.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Evaluation point outside the model support (x < x_min).
    #[error("x = {x} is below the lower bound x_min = {x_min}")]
    Domain { x: f64, x_min: f64 },

    /// Input data fails a precondition (empty tail, too few observations, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// All tail observations coincide with x_min; the exponent MLE is undefined.
    #[error("degenerate data: sum of log-ratios is zero")]
    DegenerateData,

    /// The two models have identical pointwise likelihoods; the Vuong
    /// statistic is undefined.
    #[error("degenerate comparison: pointwise log-likelihood differences have zero variance")]
    DegenerateComparison,

    /// Nesting violated: the cut-off fit scored below the pure power law by
    /// more than rounding allows. Signals an optimizer bug.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
