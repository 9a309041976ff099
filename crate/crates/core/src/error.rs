use thiserror::Error;

use crate::entropy::IndexSetFamily;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid vector: {0}")]
    InvalidVector(&'static str),

    #[error("invalid weight vector: {0}")]
    InvalidWeights(&'static str),

    #[error("invalid precision: {bits} mantissa bits (minimum is {min})")]
    InvalidPrecision { bits: usize, min: usize },

    #[error("method {method} is not applicable to p = {p}, q = {q}: {reason}")]
    MethodNotApplicable {
        method: &'static str,
        p: f64,
        q: f64,
        reason: &'static str,
    },

    #[error(
        "dimension {n} exceeds the composition cap {cap}: |K_n| = 2^{} = {count:.3e} compositions",
        n - 1
    )]
    CompositionCapExceeded { n: usize, cap: usize, count: f64 },

    #[error("dimension {n} exceeds the Monte Carlo guard of {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidMcConfig(&'static str),

    #[error("dimension must be at least {min}, got {n}")]
    DimensionTooSmall { n: usize, min: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("construction exhausted its budget: {achieved} of {target} sets")]
    ConstructionExhausted {
        achieved: usize,
        target: usize,
        partial: Box<IndexSetFamily>,
    },

    #[error("required family size {required:.3e} exceeds the limit {limit}")]
    FamilyTooLarge { required: f64, limit: usize },

    #[error("arbitrary precision arithmetic failed: {0}")]
    Arithmetic(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
