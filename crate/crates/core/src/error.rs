use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} must be finite, got {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("potential is not confining: only {found} of {wanted} levels lie below the box-edge energy {ceiling}")]
    NotConfining {
        wanted: usize,
        found: usize,
        ceiling: f64,
    },

    #[error("eigenstate {n} failed normalization check (residual {residual:e})")]
    Normalization { n: usize, residual: f64 },

    #[error("root finder for level {n} did not converge")]
    NoConvergence { n: usize },

    #[error(
        "basis with n_max = {n_max} is too small: |c_{n_max}| = {last:e} exceeds tol; extend to at least n_max = {needed}"
    )]
    InsufficientBasis {
        n_max: usize,
        last: f64,
        needed: usize,
    },

    #[error("coefficient cache {path:?} was built for basis `{found}`, expected `{expected}`")]
    StaleCache {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("coefficient set is empty")]
    EmptyCoefficients,

    #[error("momentum expectation has imaginary residue {residue:e}")]
    IntegrationFailure { residue: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
