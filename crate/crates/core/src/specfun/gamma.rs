//! Log-gamma and log-binomial.

use crate::error::{Error, Result};

const SHIFT_TO: f64 = 15.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_406;

// B_{2k} / (2k (2k - 1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Natural log of the gamma function for `x > 0`.
///
/// Small arguments are shifted up with the recurrence until `x >= 15`, where
/// the Stirling series with eight Bernoulli terms is accurate to roughly one
/// ulp of the result.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("x = {x} must be positive")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    let mut z = x;
    let mut prod = 1.0;
    while z < SHIFT_TO {
        prod *= z;
        z += 1.0;
    }
    stirling(z) - prod.ln()
}

fn stirling(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series
}

/// `ln C(a, b)`.
///
/// Exact integer arithmetic is used while the binomial fits in 128 bits,
/// so small cases agree with the integer value to the last bit of the log.
pub fn log_binomial(a: u64, b: u64) -> Result<f64> {
    if b > a {
        return Err(Error::domain("log_binomial", format!("b = {b} exceeds a = {a}")));
    }
    let b = b.min(a - b);
    if b == 0 {
        return Ok(0.0);
    }
    if let Some(exact) = exact_binomial(a, b) {
        return Ok((exact as f64).ln());
    }
    Ok(log_gamma_unchecked(a as f64 + 1.0)
        - log_gamma_unchecked(b as f64 + 1.0)
        - log_gamma_unchecked((a - b) as f64 + 1.0))
}

fn exact_binomial(a: u64, b: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..b as u128 {
        // acc * (a - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul(a as u128 - i)? / (i + 1);
    }
    // f64 conversion is exact only below 2^53; beyond that the log still
    // has full relative precision
    Some(acc)
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}
