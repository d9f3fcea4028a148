//! Shared inputs for the criterion benchmarks.

use divergent_core::unfolding::UnfoldingConfig;
use divergent_core::{euler_formal_coeffs, BorelSeries, FormalSeries};
use num_complex::Complex64;

/// Points at which the Euler series is summed or truncated.
pub const SAMPLE_X: [f64; 3] = [0.05, 0.2, 1.0];

/// Euler series `sum (-1)^n n! x^(n+1)` through `a_order`.
pub fn euler(order: usize) -> FormalSeries {
    euler_formal_coeffs(order).expect("order below the factorial limit")
}

/// Its Borel transform `sum (-zeta)^n`.
pub fn euler_borel(order: usize) -> BorelSeries {
    euler(order).borel_transform().expect("offset-1 series")
}

/// `(x^2 - eps) y' + y = x` at a non-resonant `eps`.
pub fn unfolding(eps: f64) -> UnfoldingConfig {
    let g = FormalSeries::from_real(0, &[0.0, 1.0], "x").expect("finite coefficients");
    UnfoldingConfig::new(eps, g).expect("positive eps")
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
