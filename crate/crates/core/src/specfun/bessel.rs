//! Bessel functions of the first kind, real order, and their first zero.
//!
//! Small arguments use the power series, where its terms hardly cancel.
//! Everything else uses Miller's backward recurrence started well above
//! `max(x, nu)`, normalized with the Neumann series
//! `(x/2)^mu = sum_k (mu + 2k) Gamma(mu + k) / k! J_{mu+2k}(x)`
//! (`mu` the fractional part of the order). The recurrence is exact up to
//! rounding for every order below the starting index, which matters near
//! the turning point `x ≈ nu` where the first zero lives.

use super::gamma::log_gamma_unchecked;
use crate::error::{Error, Result};

pub const MAX_ORDER: f64 = 400.0;
pub const MAX_ARG: f64 = 2000.0;

/// `J_nu(x)` for `0 <= nu <= 400`, `0 < x <= 2000`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check(nu, x)?;
    Ok(eval(nu, x).value())
}

/// `(sign, ln |J_nu(x)|)`, finite where `J_nu(x)` itself underflows.
pub fn bessel_j_ln(nu: f64, x: f64) -> Result<(f64, f64)> {
    check(nu, x)?;
    let e = eval(nu, x);
    if e.mantissa == 0.0 {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    Ok((e.mantissa.signum(), e.mantissa.abs().ln() + e.ln_scale))
}

/// `J_nu(x)` together with its derivative in `x`.
pub fn bessel_j_with_derivative(nu: f64, x: f64) -> Result<(f64, f64)> {
    check(nu, x)?;
    let e = eval(nu, x);
    Ok((e.value(), e.derivative))
}

fn check(nu: f64, x: f64) -> Result<()> {
    if !(0.0..=MAX_ORDER).contains(&nu) {
        return Err(Error::domain("bessel_j", format!("order {nu} outside [0, {MAX_ORDER}]")));
    }
    if !(x > 0.0 && x <= MAX_ARG) {
        return Err(Error::domain("bessel_j", format!("argument {x} outside (0, {MAX_ARG}]")));
    }
    Ok(())
}

/// `J = mantissa · e^{ln_scale}`.
struct Eval {
    mantissa: f64,
    ln_scale: f64,
    derivative: f64,
}

impl Eval {
    fn value(&self) -> f64 {
        self.mantissa * self.ln_scale.exp()
    }
}

fn eval(nu: f64, x: f64) -> Eval {
    // the series loses about x^2 / (2 (nu + 1)) nats to cancellation
    if x * x <= 10.0 * (nu + 1.0) {
        let (sum, ln_scale) = series(nu, x);
        let j = sum * ln_scale.exp();
        let (s1, l1) = series(nu + 1.0, x);
        Eval {
            mantissa: sum,
            ln_scale,
            derivative: nu / x * j - s1 * l1.exp(),
        }
    } else {
        miller(nu, x)
    }
}

/// Power series as `(sum, ln prefactor)`.
fn series(nu: f64, x: f64) -> (f64, f64) {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * (nu + k));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    (sum, nu * (0.5 * x).ln() - log_gamma_unchecked(nu + 1.0))
}

fn miller(nu: f64, x: f64) -> Eval {
    let m0 = nu.floor() as usize;
    let mu = nu - m0 as f64;
    let top = x.max(nu);
    let start = (top + 25.0 + 10.0 * top.max(1.0).cbrt()).ceil() as usize;
    // index m runs over the orders mu + m
    let start = start.max(m0 + 20);

    const BIG: f64 = 1e250;
    let rescale_ln = BIG.ln();
    let mut shift = 0.0f64;

    let mut f_next = 0.0f64; // f_{m+1}
    let mut f = 1e-30f64; // f_m
    let mut norm = 0.0f64;

    // Neumann weights (mu + 2k) Γ(mu + k) / k! for the even index m = 2k,
    // walked downward with Γ(mu + k - 1) / (k - 1)! = Γ(mu + k) / k! · k / (mu + k - 1)
    let gamma_mu1 = log_gamma_unchecked(mu + 1.0).exp();
    let mut k_top = start / 2;
    let mut ratio = if mu == 0.0 {
        1.0 / k_top as f64
    } else {
        (log_gamma_unchecked(mu + k_top as f64) - log_gamma_unchecked(k_top as f64 + 1.0)).exp()
    };
    let mut next_weight = || -> f64 {
        let k = k_top;
        let w = if k == 0 {
            gamma_mu1
        } else {
            (mu + 2.0 * k as f64) * ratio
        };
        if k > 1 {
            ratio *= k as f64 / (mu + k as f64 - 1.0);
        }
        k_top = k.saturating_sub(1);
        w
    };

    let mut at_nu: Option<(f64, f64)> = None; // (stored f_{m0}, shift at the time)
    let mut neighbour: Option<(f64, f64)> = None;

    let mut m = start;
    loop {
        if m % 2 == 0 {
            norm += next_weight() * f;
        }
        if m == m0 {
            at_nu = Some((f, shift));
        }
        let want_neighbour = if m0 == 0 { m == 1 } else { m == m0 - 1 };
        if want_neighbour {
            neighbour = Some((f, shift));
        }
        if m == 0 {
            break;
        }
        let order = mu + m as f64;
        let f_prev = 2.0 * order / x * f - f_next;
        f_next = f;
        f = f_prev;
        m -= 1;
        if f.abs() > BIG {
            f /= BIG;
            f_next /= BIG;
            norm /= BIG;
            shift += rescale_ln;
        }
    }

    let log_half_x_mu = mu * (0.5 * x).ln();
    // true value = g e^{s}, normalization = norm e^{shift}
    let restore = |(g, s): (f64, f64)| (g / norm, s - shift + log_half_x_mu);
    let (mantissa, ln_scale) = restore(at_nu.expect("order visited"));
    let (mn, ln_n) = restore(neighbour.expect("neighbour visited"));
    let (j, jn) = (mantissa * ln_scale.exp(), mn * ln_n.exp());
    let derivative = if m0 == 0 {
        nu / x * j - jn
    } else {
        jn - nu / x * j
    };
    Eval {
        mantissa,
        ln_scale,
        derivative,
    }
}

/// McMahon-type expansion of the first zero for large order.
fn first_zero_seed(nu: f64) -> f64 {
    if nu < 1.0 {
        // j_0 = 2.4048, j_{1/2} = π, j_1 = 3.8317
        2.404_825_557_695_773 + nu * (std::f64::consts::PI - 2.404_825_557_695_773) * 2.0
    } else {
        let c = nu.cbrt();
        nu + 1.855_757_1 * c + 1.033_150 / c - 0.003_97 / nu - 0.090_8 / (nu * c * c)
            + 0.043 / (nu * nu * c)
    }
}

/// First positive zero `j_nu` of `J_nu`, `0 <= nu <= 400`.
///
/// Newton from the McMahon seed, then a sign scan confirms no earlier zero
/// exists; if the check fails the root is re-bracketed by scanning from the
/// lower bound `sqrt(nu (nu + 2))` and refined by bisection.
pub fn bessel_first_zero(nu: f64) -> Result<f64> {
    if !(0.0..=MAX_ORDER).contains(&nu) {
        return Err(Error::domain("bessel_first_zero", format!("order {nu} outside [0, {MAX_ORDER}]")));
    }
    let lower = (nu * (nu + 2.0)).sqrt().max(1e-3);
    if let Some(root) = newton(nu, first_zero_seed(nu)) {
        if root > lower && is_first(nu, lower, root) {
            return Ok(root);
        }
    }
    let (mut lo, mut hi) = scan_bracket(nu, lower)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(nu, mid).value() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(newton(nu, 0.5 * (lo + hi)).filter(|r| *r >= lo && *r <= hi).unwrap_or(0.5 * (lo + hi)))
}

fn newton(nu: f64, mut x: f64) -> Option<f64> {
    for _ in 0..50 {
        let e = eval(nu, x);
        if e.derivative == 0.0 || !e.value().is_finite() {
            return None;
        }
        let step = e.value() / e.derivative;
        let next = x - step;
        if !(next > 0.0) {
            return None;
        }
        if step.abs() <= 1e-14 * x {
            return Some(next);
        }
        x = next;
    }
    None
}

const SCAN_STEP: f64 = 0.5;

fn is_first(nu: f64, lower: f64, root: f64) -> bool {
    let mut x = lower;
    let stop = root * (1.0 - 1e-9);
    while x < stop {
        if eval(nu, x).value() <= 0.0 {
            return false;
        }
        x += SCAN_STEP;
    }
    eval(nu, stop).value() > 0.0
}

fn scan_bracket(nu: f64, lower: f64) -> Result<(f64, f64)> {
    let mut x = lower;
    let mut prev = eval(nu, x).value();
    if prev <= 0.0 {
        return Err(Error::no_converge("bessel_first_zero", format!("J_{nu} not positive at {lower}")));
    }
    while x < MAX_ARG {
        let next = x + SCAN_STEP;
        let v = eval(nu, next).value();
        if v <= 0.0 && prev > 0.0 {
            return Ok((x, next));
        }
        prev = v;
        x = next;
    }
    Err(Error::no_converge("bessel_first_zero", format!("no sign change found for order {nu}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_closed_form() {
        for x in [0.3, 1.0, PI / 2.0, 2.5, 7.0, 40.0, 300.0] {
            let want = (2.0 / (PI * x)).sqrt() * x.sin();
            let got = bessel_j(0.5, x).unwrap();
            assert!((got - want).abs() <= 1e-13 * (2.0 / (PI * x)).sqrt(), "x={x}: {got} vs {want}");
        }
        assert!((bessel_j(0.5, PI / 2.0).unwrap() - 2.0 / PI).abs() < 1e-14);
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-14);
    }

    #[test]
    fn log_form_survives_underflow() {
        let (sign, l) = bessel_j_ln(300.0, 9.0).unwrap();
        // leading series term: 300 ln 4.5 - ln 300!
        let lead = 300.0 * 4.5f64.ln() - log_gamma_unchecked(301.0);
        assert_eq!(sign, 1.0);
        assert!((l - lead).abs() < 0.1, "{l} vs {lead}");
        assert_eq!(bessel_j(300.0, 9.0).unwrap(), 0.0);
    }

    #[test]
    fn series_and_recurrence_agree_at_the_switch() {
        for nu in [0.0, 0.5, 3.0, 6.0, 24.5] {
            let x = (10.0f64 * (nu + 1.0)).sqrt();
            let (sum, ln_pref) = series(nu, x);
            let a = sum * ln_pref.exp();
            let b = miller(nu, x).value();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-3), "nu={nu}: {a} vs {b}");
        }
    }

    #[test]
    fn first_zero_of_half_order_is_pi() {
        assert!((bessel_first_zero(0.5).unwrap() - PI).abs() < 1e-13);
    }

    #[test]
    fn first_zeros_of_integer_orders() {
        // classical tabulated values
        let table = [(0.0, 2.404_825_557_695_773), (1.0, 3.831_705_970_207_512), (6.0, 9.936_109_524_217_684)];
        for (nu, j) in table {
            let got = bessel_first_zero(nu).unwrap();
            assert!((got - j).abs() <= 1e-12 * j, "nu={nu}: {got}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(bessel_j(-1.0, 1.0).is_err());
        assert!(bessel_j(1.0, 0.0).is_err());
        assert!(bessel_first_zero(401.0).is_err());
    }
}
