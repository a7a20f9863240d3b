//! Error types shared across the laboratory.

use thiserror::Error;

/// Errors produced by the laboratory's numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("Lebesgue exponent must satisfy p >= 1 (got p = {0})")]
    InvalidExponent(f64),

    #[error("ball radius must lie in (0, 1/2] (got {0})")]
    InvalidBallRadius(f64),

    #[error("field has zero L2 norm")]
    ZeroField,

    #[error("backward Gaussian requires t < 0 (got t = {0})")]
    NonNegativeTime(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "lattice truncation at {shells} shells leaves tail {tail:.3e} above tolerance {tolerance:.3e}"
    )]
    LatticeToleranceUnreachable {
        shells: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("closed-form degree {0} outside supported range 0..={1}")]
    DegreeOutOfRange(usize, usize),

    #[error("time step must be positive (got dt = {0})")]
    InvalidTimeStep(f64),

    #[error("solution blow-up at t = {t}: node magnitude {magnitude:.3e} exceeds 1e12")]
    BlowUp { t: f64, magnitude: f64 },

    #[error("validity gate violated: {0}")]
    GateViolation(String),

    #[error("similarity state under-resolved: {0}")]
    SimilarityResolution(String),

    #[error("frequency trace too short: covers {span:.3} units of tau, need >= {needed:.3}")]
    TraceTooShort { span: f64, needed: f64 },

    #[error("vanishing-order fit needs at least {needed} samples (got {got})")]
    TooFewSamples { needed: usize, got: usize },

    #[error("nonpositive Gaussian integral {value:.3e} at t = {t:.6e}")]
    NonPositiveIntegral { t: f64, value: f64 },

    #[error("delta must lie in (0, 1) (got {0})")]
    InvalidDelta(f64),

    #[error("selected delta = {delta:.6e} violates {condition}")]
    DeltaConditionViolated { delta: f64, condition: String },

    #[error("start-point certification failed: ratio {ratio:.6e} > bound {bound:.6e}")]
    CertificationFailed { ratio: f64, bound: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
