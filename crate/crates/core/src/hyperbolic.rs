//! Packing bounds in hyperbolic space `H^n` and the overlap of large balls.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::{golden_section, kl_spherical_code_bound, BoundRecord, Diagnostics, Method};
use crate::lp::{lp_solve_spherical, LPProblem};
use crate::orthopoly::GegenbauerContext;
use crate::specfun::{incomplete_beta, ln_sinh, ln_sphere_area, log_beta, LogScaled, Quadrature};

/// `ln vol(B_r)` in `H^n`: `ln(Ω_n ∫_0^r sinh^{n-1} x dx)`.
///
/// The integrand is divided by `sinh^{n-1} r` before integrating, so the
/// quadrature sees values in `[0, 1]` for every radius.
pub fn ln_hyp_ball_volume(n: usize, r: f64) -> Result<f64> {
    if !(2..=1000).contains(&n) {
        return Err(Error::domain("hyp_ball_volume", format!("n = {n} outside [2, 1000]")));
    }
    if !(r > 0.0 && r <= 500.0) {
        return Err(Error::domain("hyp_ball_volume", format!("r = {r} outside (0, 500]")));
    }
    let m = (n - 1) as f64;
    let top = ln_sinh(r);
    let q = Quadrature::with_rel_tol(1e-13);
    let e = q.integrate_strict("hyperbolic ball volume", |x: f64| (m * (ln_sinh(x) - top)).exp(), 0.0, r)?;
    Ok(ln_sphere_area(n) + m * top + e.ln())
}

pub fn hyp_ball_volume(n: usize, r: f64) -> Result<LogScaled> {
    ln_hyp_ball_volume(n, r).map(LogScaled::from_ln)
}

/// `R` with `sinh R sin(θ/2) = sinh r`.
pub fn radius_from_angle(r: f64, theta: f64) -> Result<f64> {
    if !(r > 0.0) || !(theta > 0.0 && theta <= PI) {
        return Err(Error::domain("radius_from_angle", format!("r = {r}, theta = {theta}")));
    }
    let ln_y = ln_sinh(r) - (0.5 * theta).sin().ln();
    let big_r = if ln_y > 20.0 {
        ln_y + (1.0 + (1.0 + (-2.0 * ln_y).exp()).sqrt()).ln()
    } else {
        ln_y.exp().asinh()
    };
    if theta >= FRAC_PI_3 {
        debug_assert!(big_r >= r * (1.0 - 1e-12) && big_r <= 2.0 * r * (1.0 + 1e-12));
    }
    Ok(big_r)
}

/// Packing radius `r`, angle `θ` and the derived outer radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicGeometry {
    pub n: usize,
    pub r: f64,
    pub theta: f64,
    pub big_r: f64,
    pub ln_vol_r: f64,
    pub ln_vol_big_r: f64,
}

impl HyperbolicGeometry {
    pub fn new(n: usize, r: f64, theta: f64) -> Result<Self> {
        if !(FRAC_PI_3 * (1.0 - 1e-12)..=PI).contains(&theta) {
            return Err(Error::domain("HyperbolicGeometry", format!("theta = {theta} outside [π/3, π]")));
        }
        let big_r = radius_from_angle(r, theta)?;
        Ok(HyperbolicGeometry {
            n,
            r,
            theta,
            big_r,
            ln_vol_r: ln_hyp_ball_volume(n, r)?,
            ln_vol_big_r: ln_hyp_ball_volume(n, big_r)?,
        })
    }

    /// `ln(vol(B_r) / vol(B_R))`.
    pub fn ln_volume_ratio(&self) -> f64 {
        self.ln_vol_r - self.ln_vol_big_r
    }
}

/// Which bound on `A(n, θ)` feeds the hyperbolic density bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeBound {
    /// Closed-form KL bound, or `1 - 1/cos θ` when that is smaller.
    Kl,
    /// A certified LP objective of the given degree.
    Lp { degree: usize },
}

/// Bound on `A(n, θ)`; also returns the KL degree when that bound is used.
pub fn code_size_bound(n: usize, theta: f64, code: CodeBound) -> Result<(LogScaled, Option<usize>)> {
    match code {
        CodeBound::Kl => {
            let (kl, k) = kl_spherical_code_bound(n, theta)?;
            let c = theta.cos();
            if c < 0.0 {
                let simplex = LogScaled::from_f64(1.0 - 1.0 / c);
                if simplex < kl {
                    return Ok((simplex, None));
                }
            }
            Ok((kl, Some(k)))
        }
        CodeBound::Lp { degree } => {
            let p = LPProblem::new(n, theta, degree)?;
            let cert = lp_solve_spherical(&p)?;
            if !cert.certified {
                return Err(Error::Certificate(format!(
                    "LP certificate for n = {n}, theta = {theta} failed verification"
                )));
            }
            Ok((LogScaled::from_f64(cert.objective), None))
        }
    }
}

pub fn hyp_density_bound(n: usize, r: f64, theta: f64, refined: bool) -> Result<BoundRecord> {
    hyp_density_bound_with(n, r, theta, refined, CodeBound::Kl)
}

/// `sin^{n-1}(θ/2) A(n, θ)`, or with `refined` the sharper
/// `vol(B_r) / vol(B_R) A(n, θ)`.
pub fn hyp_density_bound_with(n: usize, r: f64, theta: f64, refined: bool, code: CodeBound) -> Result<BoundRecord> {
    let geom = HyperbolicGeometry::new(n, r, theta)?;
    let (a, k) = code_size_bound(n, theta, code)?;
    let ln_factor = if refined {
        geom.ln_volume_ratio()
    } else {
        (n as f64 - 1.0) * (0.5 * theta).sin().ln()
    };
    Ok(BoundRecord {
        dimension: n,
        method: if refined { Method::HypRefined } else { Method::HypCoarse },
        value: LogScaled::from_ln(ln_factor + a.ln()),
        k_star: k,
        theta_star: Some(theta),
        radius: Some(geom.big_r),
        diagnostics: Diagnostics::default(),
    })
}

/// Minimizes the hyperbolic bound over `θ ∈ [π/3, π]`.
///
/// Between consecutive angles `arccos t_{n,k}` the KL bound is constant
/// while the geometric factor grows with `θ`, so only those angles and `π/3`
/// can be minimizers of the KL branch. The simplex branch on `(π/2, π]` is
/// continuous and is searched by golden section.
pub fn hyp_bound_optimized(n: usize, r: f64, refined: bool) -> Result<BoundRecord> {
    if n < 2 {
        return Err(Error::domain("hyp_bound_optimized", format!("n = {n} < 2")));
    }
    let ctx = GegenbauerContext::shared(n)?;
    let mut candidates = vec![FRAC_PI_3];
    let mut k = 1;
    loop {
        let t = ctx.largest_root(k)?;
        if t > 0.5 {
            break;
        }
        candidates.push(t.acos());
        k += 1;
    }
    let mut best: Option<BoundRecord> = None;
    let mut consider = |rec: BoundRecord| {
        if best.as_ref().is_none_or(|b| rec.value < b.value) {
            best = Some(rec);
        }
    };
    for theta in candidates {
        consider(hyp_density_bound(n, r, theta, refined)?);
    }

    let simplex_branch = |theta: f64| -> Result<f64> {
        let geom_ln = if refined {
            HyperbolicGeometry::new(n, r, theta)?.ln_volume_ratio()
        } else {
            (n as f64 - 1.0) * (0.5 * theta).sin().ln()
        };
        Ok(geom_ln + (1.0 - 1.0 / theta.cos()).ln())
    };
    let mut failure = None;
    let (theta, _) = golden_section(
        |t| match simplex_branch(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        FRAC_PI_2 + 1e-9,
        PI,
        1e-10,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    consider(hyp_density_bound(n, r, theta, refined)?);
    Ok(best.expect("at least one candidate"))
}

/// Limit of `vol(B_R(x) ∩ B_R(y)) / vol(B_R)` as `R -> ∞` with `d(x, y) = r`.
pub fn overlap_limit(n: usize, r: f64) -> Result<f64> {
    if n < 2 || !(r >= 0.0) {
        return Err(Error::domain("overlap_limit", format!("n = {n}, r = {r}")));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let a = 0.5 * (n as f64 - 1.0);
    let e = (-r).exp();
    let u = e / (1.0 + e);
    let half = 0.5 * log_beta(a, a)?.exp();
    Ok(incomplete_beta(u, a, a)? / half)
}

/// `vol(B_R(x) ∩ B_R(y)) / vol(B_R)` for `d(x, y) = r`.
///
/// Polar coordinates about `x`: at distance `r1` the directions whose
/// points lie within `R` of `y` form a cap, whose `sin^{n-2}` measure is an
/// incomplete beta function; the remaining `r1` integral is done by adaptive
/// quadrature. Both volumes are scaled by `e^{-(n-1)R}`.
pub fn overlap_finite(n: usize, r: f64, big_r: f64) -> Result<f64> {
    if n < 2 || !(r >= 0.0) || !(big_r > 0.0 && big_r <= 50.0) {
        return Err(Error::domain("overlap_finite", format!("n = {n}, r = {r}, R = {big_r}")));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    if r >= 2.0 * big_r {
        return Ok(0.0);
    }
    let m = n as f64 - 2.0;
    let a = 0.5 * (m + 1.0);
    let full = log_beta(a, a)?.exp();
    let sh_r = r.sinh();
    let scale = (n as f64 - 1.0) * big_r;
    // fraction of the (n-2)-sphere of directions, by the cap's polar angle;
    // (1 ∓ cos φ)/2 in product form, so neither side cancels near 0
    let cap = |r1: f64| -> Result<f64> {
        let den = sh_r * r1.sinh();
        let lower = (0.5 * (big_r + r - r1)).sinh() * (0.5 * (big_r - r + r1)).sinh() / den;
        if lower <= 0.0 {
            return Ok(0.0);
        }
        let upper = (0.5 * (r + r1 + big_r)).sinh() * (0.5 * (r + r1 - big_r)).sinh() / den;
        if upper <= 0.0 {
            return Ok(full);
        }
        if lower <= 0.5 {
            incomplete_beta(lower.min(1.0), a, a)
        } else {
            Ok(full - incomplete_beta(upper.min(1.0), a, a)?)
        }
    };
    let radial = |x: f64| ((n as f64 - 1.0) * ln_sinh(x) - scale).exp();
    let ball = Quadrature::with_rel_tol(1e-13).integrate_strict("overlap normalization", radial, 0.0, big_r)?;
    // deep-tail fractions only need absolute accuracy
    let q = Quadrature::with_rel_tol(1e-13).abs_tol(1e-17 * ball);
    // the cap is empty for r1 < r - R
    let lo = (r - big_r).max(0.0);
    let mut failure = None;
    let inter = q
        .integrate_pieces(
            |r1: f64| match cap(r1) {
                Ok(v) => radial(r1) * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            lo,
            big_r,
            &[big_r - r],
        )?
        .require("overlap integral")?;
    if let Some(e) = failure {
        return Err(e);
    }
    // |S^{n-2}| 2^{n-2} B(.) over |S^{n-1}| = full-sphere fraction
    let ln_ratio = ln_sphere_area(n - 1) + m * std::f64::consts::LN_2 - ln_sphere_area(n);
    Ok((ln_ratio.exp() * inter.value / ball).clamp(0.0, 1.0))
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

const MC_CHUNK: u64 = 1 << 14;

/// `∫_0^ρ sinh^{n-1}` for `n = 2, 3, 4`.
fn radial_mass(n: usize, rho: f64) -> f64 {
    let h = (0.5 * rho).sinh();
    match n {
        2 => 2.0 * h * h,
        3 => 0.25 * ((2.0 * rho).sinh() - 2.0 * rho),
        _ => 4.0 * h.powi(4) * (rho.cosh() + 2.0) / 3.0,
    }
}

/// Inverts the radial distribution of a uniform point in `B_R`.
///
/// Newton on `ln G`, which is increasing and concave; the start
/// `(n T)^{1/n}` lies above the root since `G(ρ) >= ρ^n / n`.
fn radial_quantile(n: usize, u: f64, big_r: f64, total: f64) -> f64 {
    let target = u * total;
    if n == 2 {
        return 2.0 * (0.5 * target).sqrt().asinh();
    }
    if target <= 0.0 {
        return 0.0;
    }
    let ln_target = target.ln();
    let mut x = (n as f64 * target).powf(1.0 / n as f64).min(big_r);
    for _ in 0..60 {
        let g = radial_mass(n, x);
        let step = (g.ln() - ln_target) * g / x.sinh().powi(n as i32 - 1);
        x -= step;
        if step.abs() <= 1e-14 * x {
            break;
        }
    }
    x.clamp(0.0, big_r)
}

/// Fraction of uniform points of `B_R(x)` that also lie in `B_R(y)`,
/// `d(x, y) = r`, in the hyperboloid model. Chunks of samples use separate
/// ChaCha streams of `seed`, so the result does not depend on scheduling.
pub fn overlap_monte_carlo(n: usize, r: f64, big_r: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    if !(2..=4).contains(&n) {
        return Err(Error::domain("overlap_monte_carlo", format!("n = {n} outside [2, 4]")));
    }
    if !(r >= 0.0) || !(big_r > 0.0 && big_r <= 30.0) || samples == 0 {
        return Err(Error::domain("overlap_monte_carlo", format!("r = {r}, R = {big_r}, samples = {samples}")));
    }
    let total = radial_mass(n, big_r);
    let (ch_r, sh_r, ch_big) = (r.cosh(), r.sinh(), big_r.cosh());
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut hits = 0u64;
            let mut dir = [0.0f64; 4];
            for _ in 0..count {
                let rho = radial_quantile(n, rng.random::<f64>(), big_r, total);
                let mut norm = 0.0;
                for d in dir.iter_mut().take(n) {
                    *d = rng.sample(StandardNormal);
                    norm += *d * *d;
                }
                let norm = norm.sqrt();
                // point (cosh ρ, sinh ρ ω); second center (cosh r, sinh r e_1)
                let p0 = rho.cosh();
                let p1 = rho.sinh() * dir[0] / norm;
                let minkowski = p0 * ch_r - p1 * sh_r;
                if minkowski <= ch_big {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let mean = hits as f64 / samples as f64;
    Ok(McEstimate {
        mean,
        stderr: (mean * (1.0 - mean) / samples as f64).sqrt(),
        samples,
    })
}

/// Overlap limit, finite-radius values and an optional Monte-Carlo check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapResult {
    pub n: usize,
    pub r: f64,
    pub limit_value: f64,
    pub finite_r_values: Vec<(f64, f64)>,
    pub mc_estimate: Option<McEstimate>,
}

pub fn overlap_report(n: usize, r: f64, radii: &[f64], mc: Option<(u64, u64)>) -> Result<OverlapResult> {
    let finite_r_values = radii
        .iter()
        .map(|&big_r| overlap_finite(n, r, big_r).map(|v| (big_r, v)))
        .collect::<Result<Vec<_>>>()?;
    let mc_estimate = match (mc, radii.last()) {
        (Some((samples, seed)), Some(&big_r)) if (2..=4).contains(&n) => {
            Some(overlap_monte_carlo(n, r, big_r, samples, seed)?)
        }
        _ => None,
    };
    Ok(OverlapResult {
        n,
        r,
        limit_value: overlap_limit(n, r)?,
        finite_r_values,
        mc_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_closed_forms() {
        let v2 = hyp_ball_volume(2, 1.0).unwrap().to_f64();
        assert!((v2 - 2.0 * PI * (1f64.cosh() - 1.0)).abs() < 1e-12 * v2);
        let v3 = hyp_ball_volume(3, 1.0).unwrap().to_f64();
        assert!((v3 - PI * (2f64.sinh() - 2.0)).abs() < 1e-12 * v3);
        let small = hyp_ball_volume(2, 1e-3).unwrap().to_f64();
        assert!((small / (PI * 1e-6) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn radius_examples() {
        assert!((radius_from_angle(0.7, PI).unwrap() - 0.7).abs() < 1e-15);
        let want = (2.0 * 1f64.sinh()).asinh();
        assert!((radius_from_angle(1.0, FRAC_PI_3).unwrap() - want).abs() < 1e-14);
        let far = radius_from_angle(20.0, FRAC_PI_3).unwrap();
        assert!((far - 20.0 - std::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn overlap_edges() {
        assert_eq!(overlap_limit(4, 0.0).unwrap(), 1.0);
        assert!(overlap_limit(3, 40.0).unwrap() < 1e-8);
        assert_eq!(overlap_finite(3, 0.0, 2.0).unwrap(), 1.0);
        assert_eq!(overlap_finite(3, 4.0, 2.0).unwrap(), 0.0);
        let u: f64 = 1.0 / (1.0 + 1f64.exp());
        let want = u.sqrt().asin() / (PI / 4.0);
        assert!((overlap_limit(2, 1.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn radial_quantile_inverts_mass() {
        for n in 2..=4 {
            let total = radial_mass(n, 6.0);
            for u in [1e-9, 1e-4, 0.3, 0.5, 0.999, 1.0] {
                let rho = radial_quantile(n, u, 6.0, total);
                let back = radial_mass(n, rho) / total;
                assert!((back / u - 1.0).abs() < 1e-10, "n={n} u={u}: {back}");
            }
        }
    }

    #[test]
    fn monte_carlo_edges() {
        let e = overlap_monte_carlo(3, 0.0, 2.0, 10_000, 7).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        let e = overlap_monte_carlo(2, 4.5, 2.0, 10_000, 7).unwrap();
        assert_eq!(e.mean, 0.0);
    }
}
