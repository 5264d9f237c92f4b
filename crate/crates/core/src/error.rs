//! Error type shared by estimator construction, sampling, and simulation.

use thiserror::Error;

/// Everything that can go wrong at runtime (as opposed to programmer errors,
/// which panic: out-of-domain basis arguments, invalid quadrature panels).
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("sample value {value} on line {line} is outside [0, 1]")]
    SampleOutOfRange { line: usize, value: f64 },

    #[error("line {line}: {text:?} is not a real number")]
    SampleParse { line: usize, text: String },

    #[error("penalty formula needs a cutoff J >= 2, got J = {j}")]
    CutoffTooSmall { j: usize },

    #[error("penalty formula needs a sample of size >= 2, got n = {n}")]
    SampleTooSmall { n: usize },

    #[error("coefficient vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("projection did not converge within {iterations} iterations (last |C - 1| = {residual:e})")]
    ProjectionDiverged { iterations: usize, residual: f64 },

    #[error("not a density: {reason}")]
    NotADensity { reason: String },

    #[error("root search failed to converge for u = {u}")]
    RootSearch { u: f64 },

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
