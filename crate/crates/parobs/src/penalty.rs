//! The exponential penalty family that replaces the unilateral constraint in
//! every solver: beta(s) = -exp(eps/(s - eps)) for s < eps, zero above.
//!
//! The function is C^1 at s = eps, nondecreasing, and bounded in (-1, 0], so
//! the reaction a penalized solver can exert is capped at 1. Test problems
//! keep their obstacle reaction below that cap.

use serde::{Deserialize, Serialize};

/// Penalization parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub eps: f64,
}

impl PenaltyParams {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0, "penalization parameter must be positive");
        PenaltyParams { eps }
    }
}

/// Exponent below which exp underflows; clamping there keeps the pair total
/// and avoids 0 * inf when the prefactor of the derivative overflows.
const UNDERFLOW_EXPONENT: f64 = -700.0;

/// Value and derivative of the penalty at gap `s`.
pub fn beta_and_prime(params: PenaltyParams, s: f64) -> (f64, f64) {
    let eps = params.eps;
    if s >= eps {
        return (0.0, 0.0);
    }
    let d = s - eps; // negative
    let arg = eps / d;
    if arg < UNDERFLOW_EXPONENT {
        return (0.0, 0.0);
    }
    let e = arg.exp();
    (-e, eps / (d * d) * e)
}
