//! Special functions and quadrature shared by every bound.

mod bessel;
mod beta;
mod faddeeva;
mod gamma;
mod log_scaled;
pub mod quad;

pub use bessel::{bessel_first_zero, bessel_j, bessel_j_ln, bessel_j_with_derivative};
pub use beta::incomplete_beta;
pub use faddeeva::{erfcx, faddeeva_w, scaled_erfc_complex};
pub use gamma::{log_beta, log_binomial, log_gamma};
pub use log_scaled::LogScaled;
pub use quad::{Estimate, QuadValue, Quadrature, Scheme};

/// `ln sinh x` for `x > 0`, without overflow for large `x`.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `∫_0^π sin^m x dx = sqrt(π) Γ((m+1)/2) / Γ(m/2 + 1)`, as a log.
pub fn ln_sine_power_integral(m: f64) -> f64 {
    0.5 * std::f64::consts::PI.ln() + gamma::log_gamma_unchecked(0.5 * (m + 1.0))
        - gamma::log_gamma_unchecked(0.5 * m + 1.0)
}

/// `ln vol(B_1^n) = (n/2) ln π - ln Γ(n/2 + 1)`.
pub fn ln_unit_ball_volume(n: usize) -> f64 {
    let n = n as f64;
    0.5 * n * std::f64::consts::PI.ln() - gamma::log_gamma_unchecked(0.5 * n + 1.0)
}

/// `ln |S^{n-1}| = ln(2 π^{n/2} / Γ(n/2))`.
pub fn ln_sphere_area(n: usize) -> f64 {
    let n = n as f64;
    std::f64::consts::LN_2 + 0.5 * n * std::f64::consts::PI.ln() - gamma::log_gamma_unchecked(0.5 * n)
}
