//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are never swallowed by output capture.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use packing_bounds::euclid::{
    best_method, cz_bound, kl_bound, kl_spherical_code_bound, levenshtein_bound, optimize_asymptotic_rate,
    rogers_bound, BoundRecord, Method,
};
use packing_bounds::hyperbolic::{
    hyp_density_bound, ln_hyp_ball_volume, overlap_finite, overlap_limit, overlap_monte_carlo,
};
use packing_bounds::lp::{lp_solve_spherical, transfer_g_to_f, LPProblem};
use packing_bounds::report::render_round_up;
use packing_bounds::specfun::ln_unit_ball_volume;
use packing_bounds::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T>(r: Result<T>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

/// Reference table, rounded up to four significant digits.
const TABLE: [(usize, [&str; 4]); 14] = [
    (12, ["8.759e-2", "1.065e-1", "1.038e0", "9.666e-1"]),
    (24, ["2.456e-3", "3.420e-3", "2.930e-2", "2.637e-2"]),
    (36, ["5.527e-5", "8.109e-5", "5.547e-4", "4.951e-4"]),
    (48, ["1.128e-6", "1.643e-6", "8.745e-6", "7.649e-6"]),
    (60, ["2.173e-8", "3.009e-8", "1.223e-7", "1.046e-7"]),
    (72, ["4.039e-10", "5.135e-10", "1.550e-9", "1.322e-9"]),
    (84, ["7.315e-12", "8.312e-12", "1.850e-11", "1.574e-11"]),
    (96, ["1.300e-13", "1.291e-13", "2.111e-13", "1.786e-13"]),
    (108, ["2.277e-15", "1.937e-15", "2.320e-15", "1.942e-15"]),
    (120, ["3.940e-17", "2.826e-17", "2.452e-17", "2.051e-17"]),
    (240, ["6.739e-35", "4.888e-36", "1.542e-37", "1.267e-37"]),
    (360, ["8.726e-53", "3.522e-55", "3.689e-58", "3.003e-58"]),
    (480, ["1.007e-70", "1.643e-74", "5.536e-79", "4.484e-79"]),
    (600, ["1.090e-88", "5.847e-94", "6.233e-100", "5.036e-100"]),
];

fn table_reproduction() -> Check {
    let start = Instant::now();
    let methods: [fn(usize) -> Result<BoundRecord>; 4] = [rogers_bound, levenshtein_bound, kl_bound, cz_bound];
    let mut mismatches = Vec::new();
    for (n, want) in TABLE {
        for (f, w) in methods.iter().zip(want) {
            let rec = ok(f(n), "bound")?;
            let got = render_round_up(rec.value, 4);
            if got != w {
                mismatches.push(format!("{}({n}) = {got}, want {w}", rec.method));
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(mismatches.is_empty(), "{}", mismatches.join("; "));
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!("56/56 entries match, {:.2}s", elapsed.as_secs_f64()))
}

fn crossovers() -> Check {
    let want = [
        (4, Method::Rogers),
        (50, Method::Rogers),
        (95, Method::Rogers),
        (96, Method::Levenshtein),
        (114, Method::Levenshtein),
        (115, Method::Kl),
        (120, Method::Kl),
    ];
    for (n, m) in want {
        let got = ok(best_method(n), "best_method")?;
        ensure!(got == m, "best_method({n}) = {got}, want {m}");
    }
    Ok("rogers up to 95, levenshtein 96..=114, kl from 115".into())
}

fn rate_optimization() -> Check {
    let r = optimize_asymptotic_rate();
    ensure!((r.theta_star - 1.0995).abs() <= 1e-3, "theta* = {}", r.theta_star);
    ensure!((r.rate_log2 + 0.5990).abs() <= 1e-3, "rate = {}", r.rate_log2);
    Ok(format!("theta* = {:.5}, rate = {:.5}", r.theta_star, r.rate_log2))
}

fn strict_improvement() -> Check {
    let ceiling = 2.0 * 1.2635f64.ln();
    let mut worst = 0.0f64;
    for n in 2..=128 {
        let kl = ok(kl_bound(n), "kl")?.value;
        let cz = ok(cz_bound(n), "cz")?.value;
        let gap = kl.ln() - cz.ln();
        ensure!(gap > 0.0 && gap < ceiling, "n = {n}: kl/cz = {}", gap.exp());
        worst = worst.max(gap);
    }
    Ok(format!("max kl/cz = {:.4} over n = 2..=128", worst.exp()))
}

fn exact_sentinel() -> Check {
    let v = ok(levenshtein_bound(1), "levenshtein(1)")?.value.to_f64();
    ensure!((v - 1.0).abs() <= 1e-12, "levenshtein(1) = {v}");
    Ok(format!("|levenshtein(1) - 1| = {:.1e}", (v - 1.0).abs()))
}

fn lp_soundness_and_dominance() -> Check {
    let degree = 10;
    let mut slowest = Duration::ZERO;
    for n in 3..=10usize {
        let nf = n as f64;
        for (theta, floor) in [(PI, 2.0), (FRAC_PI_2, 2.0 * nf), ((-1.0 / nf).acos(), nf + 1.0), (FRAC_PI_3, 0.0)] {
            let p = ok(LPProblem::new(n, theta, degree), "problem")?;
            let start = Instant::now();
            let cert = ok(lp_solve_spherical(&p), "solve")?;
            slowest = slowest.max(start.elapsed());
            ensure!(cert.certified, "n = {n}, theta = {theta}: not certified");
            ensure!(cert.objective >= floor * (1.0 - 1e-9), "n = {n}, theta = {theta}: {} < {floor}", cert.objective);
            let (kl, _) = ok(kl_spherical_code_bound(n, theta), "kl code")?;
            ensure!(
                cert.objective <= kl.to_f64() * (1.0 + 1e-6),
                "n = {n}, theta = {theta}: {} > kl {}",
                cert.objective,
                kl.to_f64()
            );
        }
    }
    for (theta, want, tol) in [(PI, 2.0, 1e-6), (FRAC_PI_2, 6.0, 1e-4)] {
        let cert = ok(lp_solve_spherical(&ok(LPProblem::new(3, theta, degree), "problem")?), "solve")?;
        ensure!((cert.objective - want).abs() <= tol, "lp(3, {theta}) = {}", cert.objective);
    }
    ensure!(slowest < Duration::from_secs(10), "slowest solve {slowest:?}");
    Ok(format!("n = 3..=10 at degree {degree}, slowest solve {:.3}s", slowest.as_secs_f64()))
}

fn transfer_identities() -> Check {
    let mut worst_closing = 0.0f64;
    for n in 2..=4usize {
        for theta in [FRAC_PI_3, FRAC_PI_2] {
            let p = ok(LPProblem::new(n, theta, 8), "problem")?;
            let cert = ok(lp_solve_spherical(&p), "solve")?;
            let t = ok(transfer_g_to_f(&cert, &p, None), "transfer")?;
            let vol_big = ln_unit_ball_volume(n).exp() * t.big_r.powi(n as i32);
            let rel = |a: f64, b: f64| (a / b - 1.0).abs();
            let at_zero = rel(t.f_at_zero, vol_big * t.g_at_one);
            ensure!(at_zero <= 1e-6, "n = {n}, theta = {theta}: f(0) off by {at_zero:.2e}");
            let mass = rel(t.integral_f, vol_big * vol_big * t.g_mean);
            ensure!(mass <= 1e-5, "n = {n}, theta = {theta}: ∫f off by {mass:.2e}");
            for (r, f) in t.sample_radii.iter().zip(&t.f_values) {
                ensure!(*r < 2.0 || *f <= 1e-8 * t.f_at_zero, "n = {n}, theta = {theta}: f({r}) = {f}");
            }
            let closing = rel(t.density_bound(), (0.5 * theta).sin().powi(n as i32) * t.g_at_one / t.g_mean);
            ensure!(closing <= 1e-4, "n = {n}, theta = {theta}: closing identity off by {closing:.2e}");
            worst_closing = worst_closing.max(closing);
        }
    }
    Ok(format!("n = 2..=4, theta in {{π/3, π/2}}, worst closing error {worst_closing:.1e}"))
}

fn hyperbolic_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..40 {
        let n = rng.random_range(2..=12usize);
        let big_r: f64 = rng.random_range(0.05..8.0);
        let r: f64 = rng.random_range(0.01..=1.0) * big_r;
        let ratio = (ok(ln_hyp_ball_volume(n, r), "vol")? - ok(ln_hyp_ball_volume(n, big_r), "vol")?).exp();
        let s = r.sinh() / big_r.sinh();
        ensure!(
            s.powi(n as i32) <= ratio * (1.0 + 1e-12) && ratio <= s.powi(n as i32 - 1) * (1.0 + 1e-12),
            "sinh ratio fails at n = {n}, r = {r}, R = {big_r}"
        );
    }
    let mut hyp = 0;
    while hyp < 1000 {
        let big_r: f64 = rng.random_range(0.05..6.0);
        let r: f64 = rng.random_range(0.5..=1.0) * big_r;
        let (a, b): (f64, f64) = (rng.random_range(0.0..=1.0) * big_r, rng.random_range(0.0..=1.0) * big_r);
        if a == 0.0 || b == 0.0 || a + b < 2.0 * r {
            continue;
        }
        let c: f64 = rng.random_range(2.0 * r..=a + b);
        let cos_g = ((a.cosh() * b.cosh() - c.cosh()) / (a.sinh() * b.sinh())).clamp(-1.0, 1.0);
        ensure!((0.5 * cos_g.acos()).sin() >= r.sinh() / big_r.sinh() * (1.0 - 1e-9), "hyperbolic angle fails");
        hyp += 1;
    }
    let mut euc = 0;
    while euc < 1000 {
        let big_r: f64 = rng.random_range(1.0..=2.0);
        let (a, b): (f64, f64) = (rng.random_range(0.0..=1.0) * big_r, rng.random_range(0.0..=1.0) * big_r);
        if a == 0.0 || b == 0.0 || a + b < 2.0 {
            continue;
        }
        let c: f64 = rng.random_range(2.0..=a + b);
        let cos_g = ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0);
        ensure!((0.5 * cos_g.acos()).sin() >= (1.0 - 1e-12) / big_r, "euclidean angle fails");
        euc += 1;
    }
    let mut cases = 0;
    for n in [2, 3, 4, 8, 16, 40, 100] {
        for r in [0.05, 0.5, 1.0, 3.0, 10.0] {
            for theta in [FRAC_PI_3, 1.2, FRAC_PI_2, 2.0, 2.8, PI] {
                let c = ok(hyp_density_bound(n, r, theta, false), "coarse")?.value;
                let f = ok(hyp_density_bound(n, r, theta, true), "refined")?.value;
                ensure!(f.ln() <= c.ln() + 1e-12, "refined > coarse at n = {n}, r = {r}, theta = {theta}");
                cases += 1;
            }
        }
    }
    Ok(format!("40 sinh-ratio instances, 1000 + 1000 triangles, {cases} refined/coarse pairs"))
}

fn overlap_convergence() -> Check {
    for n in [2, 3, 5] {
        for r in [0.5, 1.0, 2.0] {
            let limit = ok(overlap_limit(n, r), "limit")?;
            let mut prev = f64::INFINITY;
            for big_r in [4.0, 6.0, 8.0, 10.0] {
                let gap = (ok(overlap_finite(n, r, big_r), "finite")? - limit).abs();
                ensure!(gap < prev, "n = {n}, r = {r}: gap at R = {big_r} is {gap:.3e} >= {prev:.3e}");
                prev = gap;
            }
        }
    }
    for r in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let want = (1.0 / (1.0 + f64::exp(r))).sqrt().asin() / (PI / 4.0);
        let got = ok(overlap_limit(2, r), "limit")?;
        ensure!((got - want).abs() <= 1e-9, "n = 2, r = {r}: {got} vs arcsine {want}");
    }
    let mc = ok(overlap_monte_carlo(2, 1.0, 6.0, 1_000_000, 20), "monte carlo")?;
    let q = ok(overlap_finite(2, 1.0, 6.0), "finite")?;
    let z = (mc.mean - q).abs() / mc.stderr;
    ensure!(z <= 4.0, "monte carlo {} vs quadrature {q}: {z:.2} standard errors", mc.mean);
    Ok(format!("gaps shrink along R, monte carlo within {z:.2} standard errors"))
}

fn finite_n_corridor() -> Check {
    let per_dim = ok(cz_bound(600), "cz(600)")?.value.log2() / 600.0;
    ensure!(per_dim > -0.62 && per_dim < -0.50, "(1/600) log2 cz(600) = {per_dim}");
    Ok(format!("(1/600) log2 cz(600) = {per_dim:.4}; limit exponent covered by criterion 3"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("table reproduction", table_reproduction),
        ("crossovers", crossovers),
        ("rate optimization", rate_optimization),
        ("strict improvement", strict_improvement),
        ("exact sentinel", exact_sentinel),
        ("LP soundness and dominance", lp_soundness_and_dominance),
        ("transfer identities", transfer_identities),
        ("hyperbolic property suite", hyperbolic_suite),
        ("overlap convergence", overlap_convergence),
        ("finite-n corridor", finite_n_corridor),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
