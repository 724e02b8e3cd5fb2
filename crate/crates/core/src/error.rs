use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation mismatch: N = {left} vs N = {right}")]
    TruncationMismatch { left: usize, right: usize },

    /// A Fourier multiplier exponent would leave the double-precision range.
    #[error("multiplier exponent {exponent:.3} exceeds cap {cap}")]
    ExponentCap { exponent: f64, cap: f64 },

    #[error("barotropic incompressibility violated: residual {residual:.3e} > tolerance {tolerance:.3e}")]
    Incompressibility { residual: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("radius violation: nu*W = {nu_w:.6} exceeds tracked radius {radius:.6}")]
    RadiusViolation { nu_w: f64, radius: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last difference {last_difference:.3e})")]
    NoConvergence {
        iterations: usize,
        last_difference: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("norm overflow")]
    NormOverflow,

    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("threshold violated: {0}")]
    Threshold(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
