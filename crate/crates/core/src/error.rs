use thiserror::Error;

/// Errors surfaced by the statistic, alternative and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("sample value #{index} is negative ({value}); exponentiality tests need data on [0, inf)")]
    NegativeValue { index: usize, value: f64 },

    #[error("sample value #{index} is not finite")]
    NonFiniteValue { index: usize },

    #[error("statistic order k must be at least 2, got {k}")]
    InvalidOrder { k: u32 },

    #[error("exact enumeration needs {required} tuples which exceeds the budget of {budget}; switch to the sampled tuple strategy")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("U-statistic of degree {degree} needs at least {degree} observations, got {n}")]
    InsufficientSample { n: usize, degree: usize },

    #[error("{what} is not available for k = {k}")]
    UnsupportedOrder { what: &'static str, k: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("asymptotic normal p-values are only defined for the integral statistic family")]
    UnsupportedMethod,

    #[error("numerical integration failed: {0}")]
    NumericFailure(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
