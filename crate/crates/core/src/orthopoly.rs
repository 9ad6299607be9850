//! Gegenbauer polynomials `C_k^alpha` with `alpha = n/2 - 1`, their largest
//! roots, and averages over the sphere `S^{n-1}`.
//!
//! Evaluation runs the three-term recurrence on `P_k = C_k / C_k(1)`, which
//! stays in `[-1, 1]` on the interval; unnormalized values are rebuilt from
//! `ln C_k(1)`. For `n = 2` the basis is Chebyshev `T_k`, the `alpha -> 0`
//! limit of the normalized family.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{ln_sine_power_integral, log_gamma, Quadrature};

pub const DEFAULT_DEGREE_CAP: usize = 20_000;

/// Gegenbauer family for the sphere in `R^n`, with a memo of largest roots.
#[derive(Debug)]
pub struct GegenbauerContext {
    n: usize,
    alpha: f64,
    degree_cap: usize,
    roots: RwLock<HashMap<usize, f64>>,
}

impl GegenbauerContext {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_degree_cap(n, DEFAULT_DEGREE_CAP)
    }

    pub fn with_degree_cap(n: usize, degree_cap: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("GegenbauerContext", format!("dimension {n} < 2")));
        }
        Ok(GegenbauerContext {
            n,
            alpha: 0.5 * n as f64 - 1.0,
            degree_cap,
            roots: RwLock::new(HashMap::new()),
        })
    }

    /// Process-wide context for dimension `n`, so root caches are shared
    /// between callers.
    pub fn shared(n: usize) -> Result<Arc<Self>> {
        static REGISTRY: OnceLock<RwLock<HashMap<usize, Arc<GegenbauerContext>>>> = OnceLock::new();
        let reg = REGISTRY.get_or_init(Default::default);
        if let Some(ctx) = reg.read().expect("registry poisoned").get(&n) {
            return Ok(Arc::clone(ctx));
        }
        let fresh = Arc::new(Self::new(n)?);
        let mut w = reg.write().expect("registry poisoned");
        Ok(Arc::clone(w.entry(n).or_insert(fresh)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.degree_cap {
            Err(Error::domain(
                "gegenbauer",
                format!("degree {k} exceeds cap {}", self.degree_cap),
            ))
        } else {
            Ok(())
        }
    }

    /// `ln C_k(1)`; zero for the Chebyshev case.
    pub fn ln_value_at_one(&self, k: usize) -> f64 {
        if self.alpha == 0.0 || k == 0 {
            return 0.0;
        }
        // C_k(1) = Γ(k + 2α) / (Γ(2α) k!)
        let a2 = 2.0 * self.alpha;
        let lg = |x: f64| log_gamma(x).expect("positive argument");
        lg(k as f64 + a2) - lg(a2) - lg(k as f64 + 1.0)
    }

    /// `P_0(t), ..., P_d(t)` with `P_k = C_k / C_k(1)`.
    pub fn normalized_all(&self, d: usize, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(d + 1);
        out.push(1.0);
        if d == 0 {
            return out;
        }
        out.push(t);
        let a = self.alpha;
        for k in 1..d {
            let kf = k as f64;
            let next = (2.0 * (kf + a) * t * out[k] - kf * out[k - 1]) / (kf + 2.0 * a);
            out.push(next);
        }
        out
    }

    /// `P_k(t) = C_k(t) / C_k(1)`.
    pub fn eval_normalized(&self, k: usize, t: f64) -> Result<f64> {
        self.check_degree(k)?;
        let (mut prev, mut cur) = (1.0, t);
        if k == 0 {
            return Ok(1.0);
        }
        let a = self.alpha;
        for j in 1..k {
            let jf = j as f64;
            let next = (2.0 * (jf + a) * t * cur - jf * prev) / (jf + 2.0 * a);
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// Largest root `t_{n,k}` of `C_k`, cached.
    pub fn largest_root(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::domain("gegenbauer_largest_root", "degree 0 has no roots"));
        }
        self.check_degree(k)?;
        if k == 1 {
            return Ok(0.0);
        }
        if let Some(&t) = self.roots.read().expect("root cache poisoned").get(&k) {
            return Ok(t);
        }
        let t = self.jacobi_largest_eigenvalue(k)?;
        self.roots.write().expect("root cache poisoned").insert(k, t);
        Ok(t)
    }

    /// Squared off-diagonal of the Jacobi matrix, `beta_j` for `j >= 1`.
    fn beta(&self, j: usize) -> f64 {
        let a = self.alpha;
        let j = j as f64;
        if a == 0.0 {
            if j == 1.0 {
                0.5
            } else {
                0.25
            }
        } else {
            j * (j + 2.0 * a - 1.0) / (4.0 * (j + a) * (j + a - 1.0))
        }
    }

    /// Number of eigenvalues of the `k x k` Jacobi matrix below `x`.
    fn sturm_count(&self, k: usize, x: f64) -> usize {
        let mut count = 0;
        let mut q = -x;
        if q < 0.0 {
            count += 1;
        }
        for j in 1..k {
            let prev = if q == 0.0 { f64::MIN_POSITIVE } else { q };
            q = -x - self.beta(j) / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn jacobi_largest_eigenvalue(&self, k: usize) -> Result<f64> {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        if self.sturm_count(k, hi) != k || self.sturm_count(k, lo) == k {
            return Err(Error::no_converge(
                "gegenbauer_largest_root",
                format!("root of degree {k} not bracketed in (0, 1)"),
            ));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(k, mid) == k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Mean of `g(<x, y>)` over independent uniform `x, y` on the sphere, by
    /// quadrature in the angle `phi` with weight `sin^{n-2} phi`.
    pub fn mean_on_sphere<F>(&self, g: F, q: &Quadrature) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let m = self.n as f64 - 2.0;
        let ln_norm = ln_sine_power_integral(m);
        let weight = |phi: f64| {
            if m == 0.0 {
                (-ln_norm).exp()
            } else {
                (m * phi.sin().ln() - ln_norm).exp()
            }
        };
        let integrand = |phi: f64| g(phi.cos()) * weight(phi);
        q.integrate_strict("mean_on_sphere", integrand, 0.0, std::f64::consts::PI)
    }
}

/// `C_k(t)` in the standard normalization (`T_k` for `n = 2`).
pub fn gegenbauer_eval(ctx: &GegenbauerContext, k: usize, t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::domain("gegenbauer_eval", format!("t = {t} outside [-1, 1]")));
    }
    let p = ctx.eval_normalized(k, t)?;
    Ok(p * ctx.ln_value_at_one(k).exp())
}

/// Largest root `t_{n,k}` of `C_k^{n/2-1}`, `k >= 1`.
pub fn gegenbauer_largest_root(ctx: &GegenbauerContext, k: usize) -> Result<f64> {
    ctx.largest_root(k)
}

/// `g = sum_k c_k C_k` in the Gegenbauer basis of a context.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GegenbauerPoly {
    pub n: usize,
    pub coefficients: Vec<f64>,
}

impl GegenbauerPoly {
    pub fn new(ctx: &GegenbauerContext, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::domain("GegenbauerPoly", "no coefficients"));
        }
        ctx.check_degree(coefficients.len() - 1)?;
        Ok(GegenbauerPoly {
            n: ctx.n,
            coefficients,
        })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `c_k C_k(1)`, the weights of the normalized basis.
    pub fn normalized_weights(&self, ctx: &GegenbauerContext) -> Vec<f64> {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * ctx.ln_value_at_one(k).exp())
            .collect()
    }

    pub fn eval(&self, ctx: &GegenbauerContext, t: f64) -> f64 {
        let w = self.normalized_weights(ctx);
        let p = ctx.normalized_all(self.degree(), t);
        w.iter().zip(&p).map(|(a, b)| a * b).sum()
    }

    pub fn value_at_one(&self, ctx: &GegenbauerContext) -> f64 {
        self.normalized_weights(ctx).iter().sum()
    }

    /// Average over the sphere; exactly the constant coefficient.
    pub fn mean(&self) -> f64 {
        self.coefficients[0]
    }
}
