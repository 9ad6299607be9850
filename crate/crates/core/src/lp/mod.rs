//! Linear programming bound for spherical codes.
//!
//! A certificate is `g = sum_k c_k C_k` with `c_0 = 1`, `c_k >= 0` and
//! `g(t) <= 0` on `[-1, cos θ]`; then every code with minimal angle `θ` has
//! at most `g(1)` points. The continuous sign constraint is discretized on a
//! grid, the resulting LP solved through its dual, and the answer checked on
//! a much finer grid afterwards.

pub mod simplex;
mod transfer;

use std::f64::consts::{FRAC_PI_3, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::{GegenbauerContext, GegenbauerPoly};
use crate::specfun::LogScaled;

pub use transfer::{default_radii, transfer_g_to_f, TransferProbe};

/// Relative tolerance on `g(t) / g(1)` for a certificate to count.
pub const SIGN_TOLERANCE: f64 = 1e-9;
/// Relative tolerance on negative coefficients.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-12;
const REFINE_ROUNDS: usize = 3;

/// A discretized Delsarte LP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LPProblem {
    pub n: usize,
    pub theta: f64,
    pub degree: usize,
    pub constraint_grid: Vec<f64>,
}

impl LPProblem {
    /// Problem with the default grid of `8 d` Chebyshev extrema on
    /// `[-1, cos θ]`.
    pub fn new(n: usize, theta: f64, degree: usize) -> Result<Self> {
        Self::with_grid_size(n, theta, degree, 8 * degree)
    }

    pub fn with_grid_size(n: usize, theta: f64, degree: usize, points: usize) -> Result<Self> {
        let grid = chebyshev_grid(theta.cos(), points.max(2));
        Self::with_grid(n, theta, degree, grid)
    }

    pub fn with_grid(n: usize, theta: f64, degree: usize, mut grid: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("LPProblem", format!("n = {n} < 2")));
        }
        if !(theta > 0.0 && theta <= PI) {
            return Err(Error::domain("LPProblem", format!("theta = {theta} outside (0, π]")));
        }
        if !(1..=200).contains(&degree) {
            return Err(Error::domain("LPProblem", format!("degree {degree} outside [1, 200]")));
        }
        let top = theta.cos();
        if grid.iter().any(|t| !(-1.0..=top).contains(t)) {
            return Err(Error::domain("LPProblem", "grid point outside [-1, cos θ]"));
        }
        grid.push(-1.0);
        grid.push(top);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        if grid.len() > 4000 {
            return Err(Error::domain("LPProblem", format!("{} grid points exceed 4000", grid.len())));
        }
        Ok(LPProblem {
            n,
            theta,
            degree,
            constraint_grid: grid,
        })
    }
}

/// Chebyshev extrema mapped to `[-1, top]`, endpoints included.
pub fn chebyshev_grid(top: f64, points: usize) -> Vec<f64> {
    let mid = 0.5 * (top - 1.0);
    let half = 0.5 * (top + 1.0);
    let mut g: Vec<f64> = (0..points)
        .map(|j| {
            let t = mid - half * (PI * j as f64 / (points - 1) as f64).cos();
            t.clamp(-1.0, top)
        })
        .collect();
    g[0] = -1.0;
    g[points - 1] = top;
    g.dedup();
    g
}

/// A candidate `g`, its objective and how well it satisfies the constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LPCertificate {
    pub n: usize,
    pub theta: f64,
    pub degree: usize,
    /// `c_0..c_d` in the standard Gegenbauer basis.
    pub coefficients: Vec<f64>,
    /// `g(1) / c_0`.
    pub objective: f64,
    /// Largest value of `g / c_0` found on `[-1, cos θ]`.
    pub residual: f64,
    pub certified: bool,
    #[serde(default)]
    pub verification_grid_size: usize,
}

impl LPCertificate {
    /// Wraps coefficients for problem `p` and verifies them.
    pub fn from_coefficients(coefficients: Vec<f64>, p: &LPProblem) -> Result<Self> {
        let ctx = GegenbauerContext::shared(p.n)?;
        let poly = GegenbauerPoly::new(&ctx, coefficients)?;
        if !(poly.mean() > 0.0) {
            return Err(Error::Certificate(format!("c_0 = {} is not positive", poly.mean())));
        }
        let mut cert = LPCertificate {
            n: p.n,
            theta: p.theta,
            degree: poly.degree(),
            objective: poly.value_at_one(&ctx) / poly.mean(),
            coefficients: poly.coefficients,
            residual: 0.0,
            certified: false,
            verification_grid_size: 0,
        };
        let report = verify_certificate(&cert, p);
        cert.residual = report.max_residual;
        cert.certified = report.certified;
        cert.verification_grid_size = report.grid_size;
        Ok(cert)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Certificate(e.to_string()))
    }
}

/// Outcome of checking a certificate against a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub problem_matches: bool,
    /// `k >= 1` with `c_k < -1e-12 c_0`.
    pub negative_coefficients: Vec<usize>,
    /// Largest `g(t) / c_0` on the verification points.
    pub max_residual: f64,
    pub argmax: f64,
    pub value_at_one: f64,
    pub grid_size: usize,
    /// Points where `g > 0`, after polishing; used to refine the LP grid.
    pub violations: Vec<f64>,
    pub certified: bool,
}

/// Checks coefficient signs and `g <= 0` on a uniform grid of
/// `[-1, cos θ]` ten times denser than the problem's, with every local
/// maximum polished by golden-section search.
pub fn verify_certificate(cert: &LPCertificate, p: &LPProblem) -> VerificationReport {
    let problem_matches = cert.n == p.n && cert.theta == p.theta;
    let c0 = cert.coefficients.first().copied().unwrap_or(0.0);
    let negative_coefficients: Vec<usize> = cert
        .coefficients
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| **c < -COEFFICIENT_TOLERANCE * c0)
        .map(|(k, _)| k)
        .collect();

    let ctx = match GegenbauerContext::shared(cert.n) {
        Ok(c) => c,
        Err(_) => return failed_report(problem_matches),
    };
    let weights: Vec<f64> = cert
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, c)| c / c0 * ctx.ln_value_at_one(k).exp())
        .collect();
    let d = weights.len() - 1;
    let g = |t: f64| -> f64 {
        let p = ctx.normalized_all(d, t);
        weights.iter().zip(&p).map(|(w, v)| w * v).sum()
    };
    let value_at_one: f64 = weights.iter().sum();

    let top = p.theta.cos();
    let points = if top <= -1.0 { 1 } else { (10 * p.constraint_grid.len()).max(2000) };
    let ts: Vec<f64> = if points == 1 {
        vec![-1.0]
    } else {
        (0..points)
            .map(|i| (-1.0 + (top + 1.0) * i as f64 / (points - 1) as f64).min(top))
            .collect()
    };
    let vals: Vec<f64> = ts.iter().map(|&t| g(t)).collect();

    let mut candidates: Vec<(f64, f64)> = ts.iter().copied().zip(vals.iter().copied()).collect();
    for i in 1..ts.len().saturating_sub(1) {
        if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] {
            let (t, v) = golden_max(&g, ts[i - 1], ts[i + 1]);
            candidates.push((t, v));
        }
    }
    let (argmax, max_residual) = candidates
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((-1.0, f64::INFINITY));
    let mut violations: Vec<f64> = candidates
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|(t, _)| *t)
        .collect();
    violations.sort_by(f64::total_cmp);
    violations.dedup();

    let certified = problem_matches
        && c0 > 0.0
        && negative_coefficients.is_empty()
        && max_residual <= SIGN_TOLERANCE * value_at_one;
    VerificationReport {
        problem_matches,
        negative_coefficients,
        max_residual,
        argmax,
        value_at_one,
        grid_size: candidates.len(),
        violations,
        certified,
    }
}

fn failed_report(problem_matches: bool) -> VerificationReport {
    VerificationReport {
        problem_matches,
        negative_coefficients: Vec::new(),
        max_residual: f64::INFINITY,
        argmax: f64::NAN,
        value_at_one: f64::NAN,
        grid_size: 0,
        violations: Vec::new(),
        certified: false,
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if b - a <= 1e-14 {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Optimal normalized weights `y_k = c_k C_k(1)` (with `y_0 = 1`) of the LP
/// restricted to the problem grid, without any verification.
#[derive(Debug, Clone)]
pub struct RawSolution {
    pub weights: Vec<f64>,
    pub objective: f64,
}

/// Solves the grid LP as stated; no refinement or repair.
pub fn lp_solve_raw(p: &LPProblem) -> Result<RawSolution> {
    solve_on_grid(p.n, p.degree, &p.constraint_grid)
}

fn solve_on_grid(n: usize, degree: usize, grid: &[f64]) -> Result<RawSolution> {
    let ctx = GegenbauerContext::shared(n)?;
    // dual: max sum(lambda) s.t. sum_j -P_k(t_j) lambda_j <= 1 for k = 1..d
    let columns: Vec<Vec<f64>> = grid.iter().map(|&t| ctx.normalized_all(degree, t)).collect();
    let a: Vec<Vec<f64>> = (1..=degree)
        .map(|k| columns.iter().map(|p| -p[k]).collect())
        .collect();
    let sol = match simplex::maximize(&a, &vec![1.0; degree], &vec![1.0; grid.len()]) {
        Ok(s) => s,
        Err(Error::Unbounded) => return Err(Error::Infeasible),
        Err(e) => return Err(e),
    };
    let mut weights = Vec::with_capacity(degree + 1);
    weights.push(1.0);
    weights.extend(sol.duals.iter().map(|y| y.max(0.0)));
    let objective = weights.iter().sum();
    Ok(RawSolution { weights, objective })
}

fn weights_to_coefficients(ctx: &GegenbauerContext, weights: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .enumerate()
        .map(|(k, y)| y * (-ctx.ln_value_at_one(k)).exp())
        .collect()
}

/// Solves the LP, verifies the optimum on a fine grid, refines the grid at
/// violations (up to three rounds) and finally shifts `g` down by its
/// remaining positive part, which keeps every coefficient admissible.
pub fn lp_solve_spherical(p: &LPProblem) -> Result<LPCertificate> {
    let ctx = GegenbauerContext::shared(p.n)?;
    let mut grid = p.constraint_grid.clone();
    let mut cert = None;
    for round in 0..=REFINE_ROUNDS {
        let raw = solve_on_grid(p.n, p.degree, &grid)?;
        let c = LPCertificate::from_coefficients(weights_to_coefficients(&ctx, &raw.weights), p)?;
        let report = verify_certificate(&c, p);
        let done = report.max_residual <= 0.0 || report.violations.is_empty();
        cert = Some(c);
        if done || round == REFINE_ROUNDS {
            break;
        }
        grid.extend(report.violations);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
    }
    let mut cert = cert.expect("at least one round");
    if cert.residual > 0.0 {
        cert = shift_down(&cert, p)?;
    }
    Ok(cert)
}

/// `(g - δ) / (1 - δ)` with `δ` slightly above the worst residual.
fn shift_down(cert: &LPCertificate, p: &LPProblem) -> Result<LPCertificate> {
    let delta = cert.residual * (1.0 + 1e-6) + 4.0 * f64::EPSILON * cert.objective;
    if delta >= 0.5 {
        return Ok(cert.clone());
    }
    let c0 = cert.coefficients[0];
    let mut coefficients: Vec<f64> = cert.coefficients.iter().map(|c| c / c0 / (1.0 - delta)).collect();
    coefficients[0] = 1.0;
    LPCertificate::from_coefficients(coefficients, p)
}

/// `sin^n(θ/2) g(1) / c_0`, the resulting Euclidean density bound.
pub fn euclid_bound_from_certificate(cert: &LPCertificate, p: &LPProblem) -> Result<LogScaled> {
    if p.theta < FRAC_PI_3 * (1.0 - 1e-12) {
        return Err(Error::domain(
            "euclid_bound_from_certificate",
            format!("theta = {} below π/3", p.theta),
        ));
    }
    if cert.n != p.n || cert.theta != p.theta {
        return Err(Error::Certificate("certificate belongs to a different problem".into()));
    }
    if !cert.certified {
        return Err(Error::Certificate("certificate is not certified".into()));
    }
    Ok(LogScaled::from_ln(p.n as f64 * (0.5 * p.theta).sin().ln() + cert.objective.ln()))
}
