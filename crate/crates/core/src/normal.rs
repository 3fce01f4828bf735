//! Standard normal helpers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Φ(x) = ½[1 + erf(x/√2)].
pub fn cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x * FRAC_1_SQRT_2))
}

/// φ(x).
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}
