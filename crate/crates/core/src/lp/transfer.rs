//! Turning a spherical certificate `g` into a radial function on `R^n`:
//! `f(x - y)` integrates `g(cos ∠xzy)` over `z` in the lens
//! `B_R(x) ∩ B_R(y)`, `R = 1 / sin(θ/2)`.
//!
//! Put `x` at the origin and `y` at distance `r` on the first axis. In polar
//! coordinates `z = u ω` the integrand depends only on `u` and the angle `φ`
//! between `ω` and the axis, so
//! `f(r) = |S^{n-2}| ∫_0^R u^{n-1} ∫_0^{φmax} g(cos ∠xzy) sin^{n-2} φ dφ du`
//! with `|y - z|^2 = u^2 + r^2 - 2ur cos φ <= R^2` deciding `φmax`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LPCertificate, LPProblem};
use crate::error::{Error, Result};
use crate::orthopoly::GegenbauerContext;
use crate::specfun::{ln_sphere_area, Quadrature};

/// Samples of the transferred function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferProbe {
    pub n: usize,
    pub theta: f64,
    pub big_r: f64,
    pub sample_radii: Vec<f64>,
    pub f_values: Vec<f64>,
    pub f_at_zero: f64,
    pub integral_f: f64,
    pub g_at_one: f64,
    pub g_mean: f64,
}

impl TransferProbe {
    /// `vol(B_1) f(0) / ∫f`, the Euclidean bound carried by `f`.
    pub fn density_bound(&self) -> f64 {
        crate::specfun::ln_unit_ball_volume(self.n).exp() * self.f_at_zero / self.integral_f
    }
}

/// `{0, 0.5, 1, 1.5, 2, 2+ε, R, 2R-ε, 2R, 3R}`.
pub fn default_radii(big_r: f64) -> Vec<f64> {
    let eps = 1e-6;
    vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.0 + eps, big_r, 2.0 * big_r - eps, 2.0 * big_r, 3.0 * big_r]
}

struct Lens {
    n: usize,
    big_r: f64,
    ln_ring: f64,
    weights: Vec<f64>,
    ctx: std::sync::Arc<GegenbauerContext>,
    inner: Quadrature,
    outer: Quadrature,
}

impl Lens {
    fn g(&self, t: f64) -> f64 {
        let p = self.ctx.normalized_all(self.weights.len() - 1, t.clamp(-1.0, 1.0));
        self.weights.iter().zip(&p).map(|(w, v)| w * v).sum()
    }

    fn f(&self, r: f64) -> Result<f64> {
        let big_r = self.big_r;
        if r >= 2.0 * big_r {
            return Ok(0.0);
        }
        let m = self.n as i32 - 2;
        // the integrand is symmetric under x <-> y, so only the half of the
        // lens nearer to x is integrated; that keeps z away from y, where the
        // angle at z is undefined
        let shell = |u: f64| -> Result<f64> {
            let (lo, hi) = if r == 0.0 {
                (0.0, std::f64::consts::PI)
            } else {
                (
                    (0.5 * r / u).min(1.0).acos(),
                    ((u * u + r * r - big_r * big_r) / (2.0 * u * r)).clamp(-1.0, 1.0).acos(),
                )
            };
            if hi <= lo {
                return Ok(0.0);
            }
            let integrand = |phi: f64| {
                let half = (0.5 * phi).sin();
                let v2 = (u - r) * (u - r) + 4.0 * u * r * half * half;
                let cos_z = (u * u + v2 - r * r) / (2.0 * u * v2.sqrt());
                self.g(cos_z) * phi.sin().powi(m)
            };
            let e = self.inner.integrate(integrand, lo, hi)?;
            Ok(e.value * u.powi(self.n as i32 - 1))
        };
        let halves = if r == 0.0 { 1.0 } else { 2.0 };
        let mut failure = None;
        let breaks = [0.5 * r, big_r - r, r - big_r];
        let e = self.outer.integrate_pieces(
            |u| match shell(u) {
                Ok(v) => v,
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            },
            0.0,
            big_r,
            &breaks,
        )?;
        if let Some(err) = failure {
            return Err(err);
        }
        let e = e.require("transfer lens integral")?;
        Ok(halves * self.ln_ring.exp() * e.value)
    }
}

/// Samples `f` at `radii` (the default set when `None`), together with
/// `f(0)` and `∫_{R^n} f`.
pub fn transfer_g_to_f(cert: &LPCertificate, p: &LPProblem, radii: Option<&[f64]>) -> Result<TransferProbe> {
    if !(2..=8).contains(&p.n) {
        return Err(Error::domain("transfer_g_to_f", format!("n = {} outside [2, 8]", p.n)));
    }
    if cert.n != p.n || cert.theta != p.theta {
        return Err(Error::Certificate("certificate belongs to a different problem".into()));
    }
    let big_r = 1.0 / (0.5 * p.theta).sin();
    let radii: Vec<f64> = radii.map(<[f64]>::to_vec).unwrap_or_else(|| default_radii(big_r));
    if radii.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::domain("transfer_g_to_f", "radii must be nonnegative"));
    }
    let ctx = GegenbauerContext::shared(p.n)?;
    let c0 = cert.coefficients[0];
    let weights: Vec<f64> = cert
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, c)| c / c0 * ctx.ln_value_at_one(k).exp())
        .collect();
    let g_at_one: f64 = weights.iter().sum();
    let lens = Lens {
        n: p.n,
        big_r,
        ln_ring: ln_sphere_area(p.n - 1),
        weights,
        ctx,
        inner: Quadrature::with_rel_tol(1e-9).abs_tol(1e-12 * g_at_one),
        outer: Quadrature::with_rel_tol(1e-9).abs_tol(1e-12 * g_at_one * big_r.powi(p.n as i32)),
    };

    let f_values = radii.par_iter().map(|&r| lens.f(r)).collect::<Result<Vec<_>>>()?;
    let f_at_zero = lens.f(0.0)?;

    // ∫ f = |S^{n-1}| ∫_0^{2R} f(r) r^{n-1} dr
    let radial = Quadrature::with_rel_tol(1e-7).abs_tol(1e-11 * f_at_zero * big_r.powi(p.n as i32));
    let mut failure = None;
    let e = radial.integrate_pieces(
        |r| match lens.f(r) {
            Ok(v) => v * r.powi(p.n as i32 - 1),
            Err(err) => {
                failure.get_or_insert(err);
                0.0
            }
        },
        0.0,
        2.0 * big_r,
        &[2.0, big_r],
    )?;
    if let Some(err) = failure {
        return Err(err);
    }
    let e = e.require("transfer radial integral")?;
    let integral_f = ln_sphere_area(p.n).exp() * e.value;

    Ok(TransferProbe {
        n: p.n,
        theta: p.theta,
        big_r,
        sample_radii: radii,
        f_values,
        f_at_zero,
        integral_f,
        g_at_one,
        g_mean: 1.0,
    })
}
