//! Upper bounds on the sphere packing density of `R^n`.
//!
//! All values live in log space; at `n = 600` they are near `1e-100`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::GegenbauerContext;
use crate::specfun::quad::tail_cutoff;
use crate::specfun::{
    bessel_first_zero, incomplete_beta, ln_sine_power_integral, log_binomial, log_gamma, scaled_erfc_complex,
    LogScaled, Quadrature,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rogers,
    Levenshtein,
    Kl,
    Cz,
    LpTransfer,
    HypCoarse,
    HypRefined,
}

impl Method {
    pub const TABLE: [Method; 4] = [Method::Rogers, Method::Levenshtein, Method::Kl, Method::Cz];

    pub fn id(self) -> &'static str {
        match self {
            Method::Rogers => "rogers",
            Method::Levenshtein => "levenshtein",
            Method::Kl => "kl",
            Method::Cz => "cz",
            Method::LpTransfer => "lp_transfer",
            Method::HypCoarse => "hyp_coarse",
            Method::HypRefined => "hyp_refined",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.trim() {
            "rogers" => Method::Rogers,
            "levenshtein" => Method::Levenshtein,
            "kl" => Method::Kl,
            "cz" => Method::Cz,
            "lp_transfer" => Method::LpTransfer,
            "hyp_coarse" => Method::HypCoarse,
            "hyp_refined" => Method::HypRefined,
            other => return Err(Error::domain("method", format!("unknown method `{other}`"))),
        };
        Ok(m)
    }
}

/// How a bound was obtained.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Relative error estimate of the quadrature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_error: Option<f64>,
    /// `|Im| / Re` of an integral whose exact value is real.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag_residue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<usize>,
    /// `(k, ln objective)` around the chosen `k`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub neighbours: Vec<(usize, f64)>,
}

/// One computed density bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub dimension: usize,
    pub method: Method,
    pub value: LogScaled,
    pub k_star: Option<usize>,
    pub theta_star: Option<f64>,
    /// Outer radius `R`, for the hyperbolic bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub diagnostics: Diagnostics,
}

impl BoundRecord {
    fn new(dimension: usize, method: Method, value: LogScaled) -> Self {
        BoundRecord {
            dimension,
            method,
            value,
            k_star: None,
            theta_star: None,
            radius: None,
            diagnostics: Diagnostics::default(),
        }
    }
}

fn lg(x: f64) -> f64 {
    log_gamma(x).expect("positive argument")
}

pub fn rogers_bound(n: usize) -> Result<BoundRecord> {
    rogers_bound_with(n, &Quadrature::default())
}

/// Rogers' simplex bound.
///
/// With `z = sqrt(n/2) - iu` the integrand collapses to
/// `exp(z^2) erfcx(z)^n`, whose log is bounded; the peak value at `u = 0` is
/// factored out and the prefactor kept in log space.
pub fn rogers_bound_with(n: usize, q: &Quadrature) -> Result<BoundRecord> {
    if !(2..=1000).contains(&n) {
        return Err(Error::domain("rogers_bound", format!("n = {n} outside [2, 1000]")));
    }
    let nf = n as f64;
    let a = (0.5 * nf).sqrt();
    let log_integrand = |u: f64| -> Complex64 {
        let z = Complex64::new(a, -u);
        z * z + scaled_erfc_complex(z).ln() * nf
    };
    let peak = log_integrand(0.0).re;
    let cut = tail_cutoff(|u| log_integrand(u).re, 0.0, 1.0, peak, 40.0)?;
    let h = |u: f64| (log_integrand(u) - peak).exp();
    let right = q.integrate(h, 0.0, cut)?.require("rogers integral")?;
    let left = q.integrate(h, -cut, 0.0)?.require("rogers integral")?;
    let total = right.value + left.value;
    if !(total.re > 0.0) {
        return Err(Error::no_converge("rogers integral", format!("non-positive value {}", total.re)));
    }
    let ln_value = lg(nf + 2.0) - lg(0.5 * nf + 1.0) + 0.5 * (nf - 1.0) * std::f64::consts::PI.ln()
        - 1.5 * nf * std::f64::consts::LN_2
        + peak
        + total.re.ln();
    let mut rec = BoundRecord::new(n, Method::Rogers, LogScaled::from_ln(ln_value));
    rec.diagnostics = Diagnostics {
        quad_error: Some((right.error + left.error) / total.re),
        imag_residue: Some(total.im.abs() / total.re),
        evaluations: Some(right.evaluations + left.evaluations),
        neighbours: Vec::new(),
    };
    Ok(rec)
}

/// Levenshtein's bound `j_{n/2}^n / (Γ(n/2 + 1)^2 4^n)`.
pub fn levenshtein_bound(n: usize) -> Result<BoundRecord> {
    if !(1..=800).contains(&n) {
        return Err(Error::domain("levenshtein_bound", format!("n = {n} outside [1, 800]")));
    }
    let nf = n as f64;
    let j = bessel_first_zero(0.5 * nf)?;
    let ln_value = nf * j.ln() - 2.0 * lg(0.5 * nf + 1.0) - nf * 4f64.ln();
    Ok(BoundRecord::new(n, Method::Levenshtein, LogScaled::from_ln(ln_value)))
}

/// Kabatiansky-Levenshtein bound on the size of a spherical code in `R^n`
/// with minimal angle `theta`, using the smallest admissible `k`.
pub fn kl_spherical_code_bound(n: usize, theta: f64) -> Result<(LogScaled, usize)> {
    if n < 2 {
        return Err(Error::domain("kl_spherical_code_bound", format!("n = {n} < 2")));
    }
    if !(theta > 0.0 && theta <= std::f64::consts::PI) {
        return Err(Error::domain("kl_spherical_code_bound", format!("theta = {theta} outside (0, π]")));
    }
    let ctx = GegenbauerContext::shared(n)?;
    // cos(π/2) rounds to 6e-17, which must not skip the root t = 0
    let c = theta.cos() - 4.0 * f64::EPSILON;
    let mut k = 1;
    while ctx.largest_root(k)? < c {
        k += 1;
    }
    let ln_value = 4f64.ln() + log_binomial((k + n - 2) as u64, k as u64)? - (1.0 - ctx.largest_root(k + 1)?).ln();
    Ok((LogScaled::from_ln(ln_value), k))
}

/// `ln` of the KL packing objective at degree `k`, built on dimension `n + 1`.
pub fn kl_objective(n: usize, k: usize) -> Result<f64> {
    let ctx = GegenbauerContext::shared(n + 1)?;
    let nf = n as f64;
    Ok(0.5 * nf * (0.5 * (1.0 - ctx.largest_root(k)?)).ln() + 4f64.ln()
        + log_binomial((k + n - 1) as u64, k as u64)?
        - (1.0 - ctx.largest_root(k + 1)?).ln())
}

/// `ln` of the improved objective at degree `k`, built on dimension `n`.
pub fn cz_objective(n: usize, k: usize) -> Result<f64> {
    let ctx = GegenbauerContext::shared(n)?;
    let nf = n as f64;
    Ok(0.5 * nf * (0.5 * (1.0 - ctx.largest_root(k)?)).ln() + 4f64.ln()
        + log_binomial((k + n - 2) as u64, k as u64)?
        - (1.0 - ctx.largest_root(k + 1)?).ln())
}

/// KL density bound: `k = 1, 2, ...` up to the first local minimum.
pub fn kl_bound(n: usize) -> Result<BoundRecord> {
    if !(1..=800).contains(&n) {
        return Err(Error::domain("kl_bound", format!("n = {n} outside [1, 800]")));
    }
    let cap = GegenbauerContext::shared(n + 1)?.degree_cap() - 1;
    let mut k = 1;
    let mut cur = kl_objective(n, 1)?;
    let mut prev = None;
    loop {
        if k >= cap {
            return Err(Error::no_converge("kl_bound", format!("no local minimum below k = {cap}")));
        }
        let next = kl_objective(n, k + 1)?;
        if next >= cur {
            let mut rec = BoundRecord::new(n, Method::Kl, LogScaled::from_ln(cur));
            rec.k_star = Some(k);
            rec.diagnostics.neighbours = prev
                .into_iter()
                .chain([(k, cur), (k + 1, next)])
                .collect();
            return Ok(rec);
        }
        prev = Some((k, cur));
        cur = next;
        k += 1;
    }
}

/// Improved bound: minimum over all `k` with `t_{n,k} <= 1/2`.
pub fn cz_bound(n: usize) -> Result<BoundRecord> {
    if !(2..=800).contains(&n) {
        return Err(Error::domain("cz_bound", format!("n = {n} outside [2, 800]")));
    }
    let ctx = GegenbauerContext::shared(n)?;
    let mut values = Vec::new();
    let mut k = 1;
    while k < ctx.degree_cap() && ctx.largest_root(k)? <= 0.5 {
        values.push((k, cz_objective(n, k)?));
        k += 1;
    }
    let Some(&(k_star, best)) = values.iter().min_by(|a, b| a.1.total_cmp(&b.1)) else {
        return Err(Error::no_converge("cz_bound", "empty feasible range"));
    };
    let mut rec = BoundRecord::new(n, Method::Cz, LogScaled::from_ln(best));
    rec.k_star = Some(k_star);
    rec.theta_star = Some(ctx.largest_root(k_star)?.acos());
    let mut neighbours: Vec<_> = values
        .iter()
        .copied()
        .filter(|(k, _)| k + 1 >= k_star && *k <= k_star + 1)
        .collect();
    if neighbours.last().map(|p| p.0) == Some(k_star) {
        neighbours.push((k_star + 1, cz_objective(n, k_star + 1)?));
    }
    rec.diagnostics.neighbours = neighbours;
    Ok(rec)
}

/// Fraction of `S^{n-1}` covered by `count` caps of angular radius `theta/2`.
pub fn cap_density(n: usize, theta: f64, count: f64) -> Result<f64> {
    if n < 2 || !(theta > 0.0 && theta <= std::f64::consts::PI) || !(count > 0.0) {
        return Err(Error::domain("cap_density", format!("n={n}, theta={theta}, count={count}")));
    }
    // ∫_0^ψ sin^m = 2^m B(sin^2(ψ/2); (m+1)/2, (m+1)/2)
    let m = n as f64 - 2.0;
    let s = (0.25 * theta).sin().powi(2);
    let a = 0.5 * (m + 1.0);
    let part = incomplete_beta(s, a, a)?;
    Ok((count.ln() + m * std::f64::consts::LN_2 + part.ln() - ln_sine_power_integral(m)).exp())
}

/// Per-dimension exponent of the asymptotic bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub theta_star: f64,
    pub rate_log2: f64,
}

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `log2 sin(θ/2)` plus the exponent of the KL code bound, per dimension.
pub fn asymptotic_rate_objective(theta: f64) -> f64 {
    let s = theta.sin();
    let entropy = x_ln_x((1.0 + s) / (2.0 * s)) - x_ln_x((1.0 - s) / (2.0 * s));
    (0.5 * theta).sin().log2() + entropy / std::f64::consts::LN_2
}

/// Minimizes [`asymptotic_rate_objective`] over `(0, π/2]`.
pub fn optimize_asymptotic_rate() -> RateResult {
    use std::f64::consts::FRAC_PI_2;
    let f = asymptotic_rate_objective;
    // coarse grid, then golden section around the best node
    let steps = 400;
    let h = FRAC_PI_2 / steps as f64;
    let best = (1..=steps)
        .map(|i| i as f64 * h)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("non-empty grid");
    let (theta_star, rate_log2) = golden_section(f, (best - h).max(1e-6), (best + h).min(FRAC_PI_2), 1e-10);
    RateResult { theta_star, rate_log2 }
}

/// Golden-section minimization on `[a, b]`; returns `(argmin, min)`.
pub(crate) fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // the endpoints are candidates too
    let x = 0.5 * (a + b);
    [(x, f(x)), (a, f(a)), (b, f(b))]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("three candidates")
}

/// Best of the three classical bounds (the improved bound is excluded).
/// Ties go to Rogers, then Levenshtein.
pub fn best_method(n: usize) -> Result<Method> {
    if !(4..=800).contains(&n) {
        return Err(Error::domain("best_method", format!("n = {n} outside [4, 800]")));
    }
    let r = rogers_bound(n)?.value;
    let l = levenshtein_bound(n)?.value;
    let k = kl_bound(n)?.value;
    let mut best = (Method::Rogers, r);
    for cand in [(Method::Levenshtein, l), (Method::Kl, k)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    Ok(best.0)
}

/// Best classical method for every `n` in `lo..=hi`, in order of `n`.
pub fn crossover_scan(lo: usize, hi: usize) -> Result<Vec<(usize, Method)>> {
    if !(4 <= lo && lo <= hi && hi <= 800) {
        return Err(Error::domain("crossover_scan", format!("range {lo}..={hi} not within 4..=800")));
    }
    (lo..=hi)
        .into_par_iter()
        .map(|n| best_method(n).map(|m| (n, m)))
        .collect()
}

/// Dimensions where the best method changes: `(last n of old, old, new)`.
pub fn transitions(scan: &[(usize, Method)]) -> Vec<(usize, Method, Method)> {
    scan.windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[0].0, w[0].1, w[1].1))
        .collect()
}

/// Computes one of the four tabulated bounds.
pub fn compute(method: Method, n: usize, q: &Quadrature) -> Result<BoundRecord> {
    match method {
        Method::Rogers => rogers_bound_with(n, q),
        Method::Levenshtein => levenshtein_bound(n),
        Method::Kl => kl_bound(n),
        Method::Cz => cz_bound(n),
        other => Err(Error::domain("compute", format!("`{other}` is not a Euclidean table method"))),
    }
}
