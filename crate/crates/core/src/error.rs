use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cutoff T must exceed 1, got {0}")]
    CutoffTooSmall(f64),

    #[error("exponent sigma must be finite and nonnegative, got {0}")]
    NegativeSigma(f64),

    #[error("derivative order must be nonnegative, got {0}")]
    NegativeOrder(i64),

    #[error("interval [{lo}, {hi}] is empty or not finite")]
    DegenerateInterval { lo: f64, hi: f64 },

    #[error("sample and weight table were built for different polynomial specs")]
    SpecMismatch,

    #[error("polynomial is identically zero (every weight vanishes)")]
    DegenerateSpec,

    #[error("covariance B(t) = {b} is not positive at t = {t}")]
    NonPositiveVariance { t: f64, b: f64 },

    #[error("grid step must be positive and finite, got {0}")]
    InvalidStep(f64),

    #[error("refinement tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("moment index j = {0} outside {{0, 1, 2}}")]
    MomentIndex(usize),

    #[error("Stieltjes constant index {0} outside supported range 0..=16")]
    StieltjesIndex(usize),

    #[error(
        "deterministic quadrature needs {needed} nodes, cap is {cap}; use the stratified method"
    )]
    BudgetExceeded { needed: usize, cap: usize },

    #[error("at least {min} {what} required, got {got}")]
    TooFew {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("{0}")]
    Unsupported(String),

    #[error("coefficient list is empty")]
    EmptyCoefficients,
}

pub type Result<T> = std::result::Result<T, Error>;
