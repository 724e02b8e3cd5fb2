//! Numerical counterparts of the inequality machinery: exponent feasibility,
//! ratio probes and empirical constants.

pub mod constants;
pub mod exponents;
pub mod probes;

pub use constants::{
    damping_threshold_check, estimate_c_sigma, estimate_c_star, ConstantEstimate, ThresholdCheck,
};
pub use exponents::{exponent_feasible, ExponentPair};
pub use probes::{product_estimate_ratio, nonlinear_estimate_ratio, twisted_cancellation_probe};
