use thiserror::Error;

/// Errors raised by the evaluation, solver and reporting layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A distribution or auxiliary function was built with invalid parameters.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The von Mises functionals are singular where F(x) or 1 - F(x) vanishes.
    #[error("pole at x = {x}: F(x) = {cdf:e}, 1 - F(x) = {survival:e}")]
    Pole { x: f64, cdf: f64, survival: f64 },

    #[error("distribution `{0}` has no density")]
    NoDensity(String),

    /// Bracketing or bisection failed to produce a root.
    #[error("solver failure: {0}")]
    Solver(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
