//! Incomplete beta function (unregularized).

use super::gamma::log_beta;
use crate::error::{Error, Result};

/// `B(u; alpha, beta) = ∫_0^u t^(alpha-1) (1-t)^(beta-1) dt`.
///
/// Evaluated with the Lentz continued fraction on whichever tail converges
/// fast, reflecting through `B(u; a, b) = B(a, b) - B(1-u; b, a)` otherwise.
pub fn incomplete_beta(u: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain("incomplete_beta", format!("u = {u} outside [0, 1]")));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::domain(
            "incomplete_beta",
            format!("parameters ({alpha}, {beta}) must be positive"),
        ));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let complete = log_beta(alpha, beta)?.exp();
    if u == 1.0 {
        return Ok(complete);
    }
    if u <= (alpha + 1.0) / (alpha + beta + 2.0) {
        lower_tail(u, alpha, beta)
    } else {
        Ok(complete - lower_tail(1.0 - u, beta, alpha)?)
    }
}

fn lower_tail(x: f64, a: f64, b: f64) -> Result<f64> {
    let front = (a * x.ln() + b * (-x).ln_1p()).exp() / a;
    Ok(front * continued_fraction(x, a, b)?)
}

fn continued_fraction(x: f64, a: f64, b: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..20_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::no_converge("incomplete_beta", format!("continued fraction at x={x}, a={a}, b={b}")))
}
