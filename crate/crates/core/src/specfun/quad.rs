//! Numerical integration over finite intervals.
//!
//! Two schemes are offered: globally adaptive Gauss-Kronrod (21 points,
//! bisecting the interval with the worst error estimate first) and tanh-sinh
//! for integrands with endpoint singularities. Both work for real and complex
//! integrands and are fully deterministic.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values that can be integrated.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
    fn has_nan(self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn has_nan(self) -> bool {
        self.is_nan()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn has_nan(self) -> bool {
        self.re.is_nan() || self.im.is_nan()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    AdaptiveGaussLegendre,
    TanhSinh,
}

/// Quadrature configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub scheme: Scheme,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Subdivisions (Gauss-Kronrod) or halvings of the step (tanh-sinh).
    pub max_refinements: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            scheme: Scheme::AdaptiveGaussLegendre,
            rel_tol: 1e-11,
            abs_tol: 0.0,
            max_refinements: 4000,
        }
    }
}

/// Result of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl<T> Estimate<T> {
    /// Turns a non-converged estimate into an error.
    pub fn require(self, what: &'static str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::no_converge(
                what,
                format!("error estimate {:.3e} after {} evaluations", self.error, self.evaluations),
            ))
        }
    }
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Quadrature {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn tanh_sinh(rel_tol: f64) -> Self {
        Quadrature {
            scheme: Scheme::TanhSinh,
            rel_tol,
            abs_tol: 0.0,
            max_refinements: 12,
        }
    }

    pub fn abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn target(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }

    /// Integrates `f` over `[a, b]`. Non-convergence is reported through
    /// [`Estimate::converged`]; a NaN from the integrand is an error.
    pub fn integrate<T, F>(&self, f: F, a: f64, b: f64) -> Result<Estimate<T>>
    where
        T: QuadValue,
        F: FnMut(f64) -> T,
    {
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain("integrate", "rel_tol must be positive"));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain("integrate", format!("interval [{a}, {b}] is not finite")));
        }
        if a == b {
            return Ok(Estimate {
                value: T::default(),
                error: 0.0,
                converged: true,
                evaluations: 0,
            });
        }
        if b < a {
            let e = self.integrate(f, b, a)?;
            return Ok(Estimate {
                value: e.value * -1.0,
                ..e
            });
        }
        match self.scheme {
            Scheme::AdaptiveGaussLegendre => self.gauss_kronrod(f, a, b),
            Scheme::TanhSinh => self.tanh_sinh_rule(f, a, b),
        }
    }

    /// Like [`integrate`](Self::integrate) but fails when the tolerance is
    /// not met.
    pub fn integrate_strict<T, F>(&self, what: &'static str, f: F, a: f64, b: f64) -> Result<T>
    where
        T: QuadValue,
        F: FnMut(f64) -> T,
    {
        Ok(self.integrate(f, a, b)?.require(what)?.value)
    }

    /// Integrates over `[a, b]` with additional interior breakpoints where
    /// the integrand has kinks. Breakpoints outside the interval are ignored.
    pub fn integrate_pieces<T, F>(&self, mut f: F, a: f64, b: f64, breaks: &[f64]) -> Result<Estimate<T>>
    where
        T: QuadValue,
        F: FnMut(f64) -> T,
    {
        let mut pts: Vec<f64> = std::iter::once(a)
            .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
            .chain(std::iter::once(b))
            .collect();
        pts.sort_by(|x, y| x.total_cmp(y));
        pts.dedup();
        let mut total = Estimate {
            value: T::default(),
            error: 0.0,
            converged: true,
            evaluations: 0,
        };
        for w in pts.windows(2) {
            let e = self.integrate(&mut f, w[0], w[1])?;
            total.value = total.value + e.value;
            total.error += e.error;
            total.converged &= e.converged;
            total.evaluations += e.evaluations;
        }
        Ok(total)
    }

    fn gauss_kronrod<T, F>(&self, mut f: F, a: f64, b: f64) -> Result<Estimate<T>>
    where
        T: QuadValue,
        F: FnMut(f64) -> T,
    {
        let mut evaluations = 0usize;
        let first = gk21(&mut f, a, b, &mut evaluations)?;
        let mut total = first.value;
        let mut total_err = first.error;
        let mut heap = BinaryHeap::new();
        heap.push(first);
        let mut seq = 0usize;
        let mut stuck = Vec::new();

        while total_err > self.target(total.magnitude()) {
            if seq >= self.max_refinements {
                break;
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * (b - a) {
                // the segment cannot be split further in floating point
                stuck.push(worst);
                continue;
            }
            seq += 1;
            let left = gk21(&mut f, worst.a, mid, &mut evaluations)?;
            let right = gk21(&mut f, mid, worst.b, &mut evaluations)?;
            total = total - worst.value + left.value + right.value;
            total_err = total_err - worst.error + left.error + right.error;
            heap.push(left);
            heap.push(right);
        }
        // re-sum to shed the drift of the running update
        let segments: Vec<_> = heap.into_iter().chain(stuck).collect();
        let mut sorted = segments;
        sorted.sort_by(|x, y| x.a.total_cmp(&y.a));
        let value = sorted.iter().fold(T::default(), |acc, s| acc + s.value);
        let error: f64 = sorted.iter().map(|s| s.error).sum();
        Ok(Estimate {
            value,
            error,
            converged: error <= self.target(value.magnitude()),
            evaluations,
        })
    }

    fn tanh_sinh_rule<T, F>(&self, mut f: F, a: f64, b: f64) -> Result<Estimate<T>>
    where
        T: QuadValue,
        F: FnMut(f64) -> T,
    {
        use std::f64::consts::FRAC_PI_2;
        let half = 0.5 * (b - a);
        let mut evaluations = 0usize;
        // abscissae run over |t| <= T_MAX; beyond it the weights underflow
        const T_MAX: f64 = 6.0;

        let mut eval = |t: f64, evaluations: &mut usize| -> Result<T> {
            let s = FRAC_PI_2 * t.sinh();
            let c = FRAC_PI_2 * t.cosh();
            let ch = s.cosh();
            let w = c / (ch * ch);
            // distance from the nearest endpoint, computed without cancellation
            let comp = half * (-2.0 * s.abs()).exp() * 2.0 / (1.0 + (-2.0 * s.abs()).exp());
            let x = if s >= 0.0 { b - comp } else { a + comp };
            if !(x > a && x < b) || w == 0.0 {
                return Ok(T::default());
            }
            *evaluations += 1;
            let v = f(x);
            if v.has_nan() {
                return Err(Error::NanIntegrand { at: x });
            }
            Ok(v * (w * half))
        };

        let mut h = 1.0;
        let mut sum = eval(0.0, &mut evaluations)?;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            let t = k as f64 * h;
            sum = sum + eval(t, &mut evaluations)? + eval(-t, &mut evaluations)?;
            k += 1;
        }
        let mut estimate = sum * h;
        let mut error = f64::INFINITY;

        for _ in 0..self.max_refinements {
            h *= 0.5;
            let mut k = 1;
            while (k as f64) * h <= T_MAX {
                let t = k as f64 * h;
                sum = sum + eval(t, &mut evaluations)? + eval(-t, &mut evaluations)?;
                k += 2;
            }
            let next = sum * h;
            error = (next - estimate).magnitude();
            estimate = next;
            if error <= self.target(estimate.magnitude()) {
                break;
            }
        }
        Ok(Estimate {
            value: estimate,
            error,
            converged: error <= self.target(estimate.magnitude()),
            evaluations,
        })
    }
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    // largest error first; ties broken by position so the order is total
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn gk21<T, F>(f: &mut F, a: f64, b: f64, evaluations: &mut usize) -> Result<Segment<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut call = |x: f64| -> Result<T> {
        *evaluations += 1;
        let v = f(x);
        if v.has_nan() {
            Err(Error::NanIntegrand { at: x })
        } else {
            Ok(v)
        }
    };
    let fc = call(center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::default();
    let mut abs_sum = fc.magnitude() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = call(center - dx)?;
        let f2 = call(center + dx)?;
        let pair = f1 + f2;
        kronrod = kronrod + pair * WGK[j];
        abs_sum += (f1.magnitude() + f2.magnitude()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let raw_err = ((kronrod - gauss) * half).magnitude();
    // roundoff floor, as in QUADPACK
    let floor = 50.0 * f64::EPSILON * abs_sum * half.abs();
    Ok(Segment {
        a,
        b,
        value,
        error: raw_err.max(floor),
    })
}

/// Finds a cutoff `x >= start` beyond which `log_magnitude` stays at least
/// `drop` nats below `peak`, by doubling the distance from `origin`.
///
/// Assumes the integrand decays monotonically past `start`.
pub fn tail_cutoff<F>(mut log_magnitude: F, origin: f64, start: f64, peak: f64, drop: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut dist = (start - origin).max(1.0);
    for _ in 0..64 {
        let x = origin + dist;
        if log_magnitude(x) <= peak - drop {
            return Ok(x);
        }
        dist *= 2.0;
    }
    Err(Error::no_converge("tail truncation", "integrand does not decay"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let e = Quadrature::default().integrate(|t: f64| t * t, 0.0, 1.0).unwrap();
        assert!(e.converged);
        assert!((e.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let q = Quadrature::default();
        let fwd = q.integrate(f64::exp, 0.0, 2.0).unwrap().value;
        let back = q.integrate(f64::exp, 2.0, 0.0).unwrap().value;
        assert_eq!(fwd, -back);
    }

    #[test]
    fn complex_integrand() {
        // ∫_0^π e^{it} dt = 2i
        let e = Quadrature::default()
            .integrate(|t: f64| Complex64::new(0.0, t).exp(), 0.0, PI)
            .unwrap();
        assert!((e.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let q = Quadrature::tanh_sinh(1e-12);
        let e = q.integrate(|t: f64| 1.0 / t.sqrt(), 0.0, 1.0).unwrap();
        assert!(e.converged, "{e:?}");
        assert!((e.value - 2.0).abs() < 1e-11, "{}", e.value);
        let e = q.integrate(f64::ln, 0.0, 1.0).unwrap();
        assert!((e.value + 1.0).abs() < 1e-11, "{}", e.value);
        // singular at the upper end too; 1 - t is exact near t = 1
        let e = q.integrate(|t: f64| 1.0 / (t * (1.0 - t)).sqrt(), 0.0, 1.0).unwrap();
        assert!((e.value - PI).abs() < 1e-7, "{}", e.value);
    }

    #[test]
    fn nan_is_an_error() {
        let r = Quadrature::default().integrate(|t: f64| if t > 0.5 { f64::NAN } else { t }, 0.0, 1.0);
        assert!(matches!(r, Err(Error::NanIntegrand { .. })));
    }

    #[test]
    fn starved_budget_is_flagged() {
        let q = Quadrature {
            max_refinements: 1,
            rel_tol: 1e-14,
            ..Quadrature::default()
        };
        let e = q.integrate(|t: f64| (1.0 / (t + 1e-6)).sin(), 0.0, 1.0).unwrap();
        assert!(!e.converged);
        assert!(e.require("test").is_err());
    }

    #[test]
    fn tail_cutoff_doubles_outward() {
        let x = tail_cutoff(|u| -u * u, 0.0, 1.0, 0.0, 40.0).unwrap();
        assert!(x * x >= 40.0 && x <= 8.0);
    }
}
