use thiserror::Error;

/// Errors raised by the reserving library.
///
/// Triangle indices in messages are 1-based `(accident year, development year)`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("cell ({i}, {j}) is not populated")]
    Unpopulated { i: usize, j: usize },

    #[error("cell ({i}, {j}) is outside an {n}x{n} triangle")]
    OutOfRange { i: usize, j: usize, n: usize },

    #[error("D({i}, 1) = {value}: development in the first year must be 0")]
    NonZeroFirstDevelopment { i: usize, value: String },

    #[error("negative cumulative claims C({i}, {j}) = {value}")]
    NegativeCumulative { i: usize, j: usize, value: String },

    #[error("exposure E({i}) = {value} must be strictly positive and finite")]
    NonPositiveExposure { i: usize, value: String },

    #[error("zero denominator while estimating {what} at development year {j}")]
    ZeroDenominator { what: &'static str, j: usize },

    #[error("development factor Delta({j}) = {value} must be < 1")]
    DeltaNotBelowOne { j: usize, value: String },

    #[error("infeasible jump-size law: need 0 < E[Z] = {mean} < E[Z^2]/E[Z] = {ratio}")]
    InfeasibleJumpLaw { mean: String, ratio: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("regression: {0}")]
    Regression(String),

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("replicate {replicate}: no feasible refit after {attempts} attempts")]
    ResampleLimit { replicate: usize, attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
