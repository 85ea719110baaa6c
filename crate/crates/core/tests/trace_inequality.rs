//! `∫_{Ω∩∂B_ρ(a)} |u|² dS ≤ C ρ ∫_{Ω∩(B_{2ρ}∖B_ρ)} |∇u|² dx` for `u` vanishing on `∂B₁`.

use std::f64::consts::PI;

use num_complex::Complex64;

type TestFn = fn(Complex64) -> (f64, [f64; 2]);

fn bowl(x: Complex64) -> (f64, [f64; 2]) {
    (1.0 - x.norm_sqr(), [-2.0 * x.re, -2.0 * x.im])
}

fn tilted(x: Complex64) -> (f64, [f64; 2]) {
    let g = 1.0 + 0.5 * x.im;
    let b = 1.0 - x.norm_sqr();
    (b * g, [-2.0 * x.re * g, -2.0 * x.im * g + 0.5 * b])
}

fn wavy(x: Complex64) -> (f64, [f64; 2]) {
    let r = x.norm();
    let v = (PI * (1.0 - r)).sin();
    let dv = -PI * (PI * (1.0 - r)).cos();
    let (c, s) = if r > 0.0 { (x.re / r, x.im / r) } else { (0.0, 0.0) };
    (v * (1.0 + x.re), [dv * c * (1.0 + x.re) + v, dv * s * (1.0 + x.re)])
}

/// Ratio of the two sides around `a = 1`, by midpoint rules in local polar coordinates.
fn ratio(u: TestFn, rho: f64) -> f64 {
    let a = Complex64::new(1.0, 0.0);
    let m = 2000;
    // arcs of ∂B_r(a) inside the unit disk: directions with angle in (π/2 + asin(r/2), 3π/2 - asin(r/2))
    let arc = |r: f64| {
        let half = 0.5 * PI - (0.5 * r).asin();
        (PI - half, PI + half)
    };
    let (lo, hi) = arc(rho);
    let dphi = (hi - lo) / m as f64;
    let boundary: f64 = (0..m)
        .map(|k| {
            let phi = lo + (k as f64 + 0.5) * dphi;
            u(a + Complex64::from_polar(rho, phi)).0.powi(2) * rho * dphi
        })
        .sum();
    let n = 400;
    let dr = rho / n as f64;
    let mut bulk = 0.0;
    for i in 0..n {
        let r = rho + (i as f64 + 0.5) * dr;
        let (lo, hi) = arc(r);
        let dphi = (hi - lo) / n as f64;
        for k in 0..n {
            let phi = lo + (k as f64 + 0.5) * dphi;
            let g = u(a + Complex64::from_polar(r, phi)).1;
            bulk += (g[0] * g[0] + g[1] * g[1]) * r * dr * dphi;
        }
    }
    boundary / (rho * bulk)
}

#[test]
fn ratio_stays_bounded_along_the_ladder() {
    for u in [bowl as TestFn, tilted, wavy] {
        let ratios: Vec<f64> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&r| ratio(u, r)).collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max < 1.0, "{ratios:?}");
        assert!(max / min < 1.5, "{ratios:?}");
    }
}
