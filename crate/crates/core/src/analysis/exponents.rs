//! Young-exponent feasibility for the local existence estimate.
//!
//! With `x = sigma s - 1` and conjugate exponents `1/p + 1/q = 3/2`, the two
//! requirements are
//!
//! ```text
//! 2p/(2-p) x > 2    and    2q/(2-q) x > 3
//! ```
//!
//! equivalent to `2/(1+x) < p < 3/(3-x)`, which is non-empty iff `x > 3/5`.
//! At the boundary both intervals shrink to `p = 5/4`, `q = 10/7`.

use crate::error::{invalid, Result};

/// Strictness margin: a condition `lhs > rhs` holds when `lhs - rhs > FEASIBILITY_MARGIN`.
pub const FEASIBILITY_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    pub p: f64,
    pub q: f64,
    /// `2p/(2-p) x - 2`
    pub slack_p: f64,
    /// `2q/(2-q) x - 3`
    pub slack_q: f64,
}

pub fn conjugate(p: f64) -> f64 {
    1.0 / (1.5 - 1.0 / p)
}

pub fn slack_p(p: f64, x: f64) -> f64 {
    2.0 * p / (2.0 - p) * x - 2.0
}

pub fn slack_q(q: f64, x: f64) -> f64 {
    2.0 * q / (2.0 - q) * x - 3.0
}

fn check_inputs(sigma: f64, s: f64) -> Result<()> {
    if !(sigma > 0.0) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    if !(sigma < 2.0) {
        return Err(invalid(format!(
            "the estimate requires sigma < 2, got {sigma}"
        )));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(invalid(format!("s must lie in (0, 1], got {s}")));
    }
    Ok(())
}

/// Both conditions at `(p, q)` with the strictness margin.
pub fn pair_admissible(p: f64, q: f64, x: f64) -> bool {
    slack_p(p, x) > FEASIBILITY_MARGIN && slack_q(q, x) > FEASIBILITY_MARGIN
}

/// A feasible pair, taken at `p = 5/4` (the point that stays feasible down
/// to the boundary), or `None` when no pair exists.
pub fn exponent_feasible(sigma: f64, s: f64) -> Result<Option<ExponentPair>> {
    check_inputs(sigma, s)?;
    let x = sigma * s - 1.0;
    let (p, q) = (1.25, conjugate(1.25));
    if !pair_admissible(p, q, x) {
        return Ok(None);
    }
    Ok(Some(ExponentPair {
        p,
        q,
        slack_p: slack_p(p, x),
        slack_q: slack_q(q, x),
    }))
}
