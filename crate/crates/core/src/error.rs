use thiserror::Error;

/// Errors raised by the numerical and statistical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge (estimate {estimate:e}, error estimate {error:e})")]
    NonConvergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("density is singular at x = {0}")]
    SingularPoint(f64),

    #[error("pmf truncation failed: mass {mass} after {terms} terms, target 1 - {tail_tol:e}")]
    TruncationFailure {
        terms: usize,
        mass: f64,
        tail_tol: f64,
    },

    #[error("characteristic function is not integrable: total shape {total_shape} <= 1")]
    InversionNotIntegrable { total_shape: f64 },

    #[error("argument {z} lies outside the moment generating strip ({lower}, {upper})")]
    OutOfStrip { z: f64, lower: f64, upper: f64 },

    #[error("kappa undefined: g_n = {g_n:e} does not exceed h_n = {h_n:e}")]
    KappaUndefined { g_n: f64, h_n: f64 },

    #[error("models differ in more than their weights: {0}")]
    ModelMismatch(String),

    #[error("expectation diverges: {0}")]
    Divergent(String),

    #[error("empty sample")]
    EmptySample,

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("invalid parameter `{field}` = {value} at component {index}: must be finite and > 0")]
    InvalidParameter {
        index: usize,
        field: &'static str,
        value: f64,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(index: usize, field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            index,
            field,
            value,
        })
    }
}
