use thiserror::Error;

/// Crate-wide error type. Display strings lead with the variant name so the
/// CLI can surface failures verbatim without pattern matching.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NonPositiveN: matrix dimension must be at least 1")]
    NonPositiveN,

    #[error("NonPositiveBeta: beta must be a strictly positive real (got {0})")]
    NonPositiveBeta(f64),

    #[error(
        "UnsupportedBeta: dense sampling covers beta = 1 (real symmetric) \
         and beta = 2 (complex Hermitian); got {0}"
    )]
    UnsupportedBeta(f64),

    #[error(
        "InvalidExponent: exponent p = {0} is out of range (the joint law of \
         (t1, t2) needs p > -1; increase N or beta)"
    )]
    InvalidExponent(f64),

    #[error("NonPositiveT2: t2 is a sum of squares and must be strictly positive (got {0})")]
    NonPositiveT2(f64),

    #[error("InsufficientTraces: operation needs traces up to index {need}, vector holds {have}")]
    InsufficientTraces { need: usize, have: usize },

    #[error(
        "DegenerateScale: t2 - t1^2/N = {0} is not strictly positive, the \
         spectrum is a point mass and cannot be standardized"
    )]
    DegenerateScale(f64),

    #[error("SingularSystem: the Lagrange system needs exactly k distinct roots")]
    SingularSystem,

    #[error("EmptySample: statistic requires at least one observation")]
    EmptySample,

    #[error("NoConvergence: {what} stalled at error {best:e} (requested {tol:e})")]
    NoConvergence {
        what: &'static str,
        tol: f64,
        best: f64,
    },

    #[error("InvalidSpectrum: eigenvalues must be finite reals")]
    InvalidSpectrum,

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
