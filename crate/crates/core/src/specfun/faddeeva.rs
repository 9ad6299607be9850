//! The Faddeeva function `w(z) = exp(-z^2) erfc(-iz)` and the scaled
//! complementary error function built on it.
//!
//! Region split after Poppe and Wijers (ACM TOMS 680): a power series near
//! the origin, the Laplace continued fraction far away, and a Taylor
//! expansion driven by the continued fraction in between. The other three
//! quadrants follow from `w(-z) = 2 exp(-z^2) - w(z)` and
//! `w(-conj z) = conj w(z)`.

use num_complex::Complex64;

const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_573_9;

/// `w(z)` for any finite complex `z`. Overflows (to inf) only deep in the
/// lower half plane where `|w|` itself exceeds the `f64` range.
pub fn faddeeva_w(z: Complex64) -> Complex64 {
    let (xi, yi) = (z.re, z.im);
    let xabs = xi.abs();
    let yabs = yi.abs();
    let x = xabs / 6.3;
    let y = yabs / 4.4;
    let mut qrho = x * x + y * y;
    let xquad = xabs * xabs - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;

    let near_origin = qrho < 0.085_264;
    let (mut u, mut v);
    // exp(-z^2) for the first-quadrant z, reused by the reflection below
    let (mut u2, mut v2) = (0.0, 0.0);

    if near_origin {
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as usize;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let fi = i as f64;
            let xaux = (xsum * xquad - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad) / fi;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > 1.0 {
            h = 0.0;
            kapn = 0usize;
            qrho = qrho.sqrt();
            nu = (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as usize;
        } else {
            qrho = (1.0 - y) * (1.0 - qrho).sqrt();
            h = 1.88 * qrho;
            kapn = (7.0 + 34.0 * qrho).round() as usize;
            nu = (16.0 + 26.0 * qrho).round() as usize;
        }
        let h2 = 2.0 * h;
        let taylor = h > 0.0;
        let mut qlambda = if taylor { h2.powi(kapn as i32) } else { 0.0 };
        let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if taylor && n <= kapn {
                let tx = qlambda + sx;
                let nsx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                sx = nsx;
                qlambda /= h2;
            }
        }
        if taylor {
            u = TWO_OVER_SQRT_PI * sx;
            v = TWO_OVER_SQRT_PI * sy;
        } else {
            u = TWO_OVER_SQRT_PI * rx;
            v = TWO_OVER_SQRT_PI * ry;
        }
        if yabs == 0.0 {
            u = (-xabs * xabs).exp();
        }
    }

    if yi < 0.0 {
        if near_origin {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            let w1 = 2.0 * (-xquad).exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if xi > 0.0 {
            v = -v;
        }
    } else if xi < 0.0 {
        v = -v;
    }
    Complex64::new(u, v)
}

/// Scaled complementary error function `e^{z^2} erfc(z) = w(iz)`.
pub fn scaled_erfc_complex(z: Complex64) -> Complex64 {
    faddeeva_w(Complex64::new(-z.im, z.re))
}

/// Real scaled complementary error function `erfcx(x) = e^{x^2} erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    scaled_erfc_complex(Complex64::new(x, 0.0)).re
}
