//! One-dimensional quadrature for logarithmically singular integrands.
//!
//! Two tools: composite Gauss–Legendre on panels graded geometrically toward a
//! singular endpoint, and a periodic trapezoid rule for `∮ f(t) log|e^{it} - e^{is}| dt`
//! with the singular part of the integrand subtracted analytically.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre on `[a, b]` with panels shrinking geometrically toward `a`.
///
/// Panel `j` covers `a + (b - a)[σ^{j+1}, σ^j]`; the last one reaches `a` itself,
/// so `f` is only ever evaluated in the open interval.
#[derive(Debug, Clone)]
pub struct GradedRule {
    ratio: f64,
    levels: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GradedRule {
    pub fn new(points_per_panel: usize, ratio: f64, levels: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points_per_panel);
        Self {
            ratio,
            levels,
            nodes,
            weights,
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let len = b - a;
        let mut total = 0.0;
        let mut hi = 1.0;
        for level in 0..=self.levels {
            let lo = if level == self.levels { 0.0 } else { hi * self.ratio };
            let half = 0.5 * (hi - lo) * len;
            let mid = a + 0.5 * (hi + lo) * len;
            let panel: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| w * f(mid + half * x))
                .sum();
            total += half * panel;
            hi = lo;
        }
        total
    }
}

impl Default for GradedRule {
    fn default() -> Self {
        Self::new(20, 0.15, 24)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularIntegral {
    /// `∫₀^{π/2} log sin θ dθ`
    LogSin,
    /// `∫₀^{π/2} (log sin θ)² dθ`
    LogSinSquared,
}

impl SingularIntegral {
    /// Closed-form value.
    pub fn exact(self) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        match self {
            SingularIntegral::LogSin => -FRAC_PI_2 * ln2,
            SingularIntegral::LogSinSquared => FRAC_PI_2 * (ln2 * ln2 + PI * PI / 12.0),
        }
    }
}

/// Evaluate a log-singular reference integral with the graded rule.
///
/// `log sin θ` is split as `log θ + log(sin θ / θ)`; the first piece is
/// integrated in closed form, the smooth remainder (and for the square, the
/// cross term `2 log θ · log(sin θ / θ)`, which vanishes like `θ² log θ`) goes
/// through [`GradedRule`].
pub fn singular_quadrature_1d(kind: SingularIntegral) -> f64 {
    let rule = GradedRule::default();
    let b = FRAC_PI_2;
    let smooth = |x: f64| {
        if x < 1e-4 {
            // log(sin x / x) = -x²/6 - x⁴/180 - ...
            let x2 = x * x;
            -x2 / 6.0 - x2 * x2 / 180.0 - x2 * x2 * x2 / 2835.0
        } else {
            (x.sin() / x).ln()
        }
    };
    // ∫₀^b log x dx and ∫₀^b log² x dx
    let log_b = b.ln();
    let int_log = b * (log_b - 1.0);
    let int_log2 = b * (log_b * log_b - 2.0 * log_b + 2.0);
    match kind {
        SingularIntegral::LogSin => int_log + rule.integrate(smooth, 0.0, b),
        SingularIntegral::LogSinSquared => {
            let rest = rule.integrate(
                |x| {
                    let g = smooth(x);
                    2.0 * x.ln() * g + g * g
                },
                0.0,
                b,
            );
            int_log2 + rest
        }
    }
}

/// Local Taylor data `(f, f', f'')` of a periodic integrand at the singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// `∫₀^{2π} f(t) log|e^{it} - e^{is}| dt` from samples `f(2πk/N)`.
///
/// The integrand is rewritten as
/// `(f(t) - f(s) - f'(s) sin(t-s) - f''(s)(1 - cos(t-s))) log|2 sin((t-s)/2)|`,
/// which vanishes like `|t-s|³ log|t-s|` at `t = s` (extended by zero there),
/// plus the exact integrals of the subtracted terms: `0`, `0` and `π f''(s)`
/// (from `∮ log|e^{it} - a| dt = 0` and `∮ cos(t) log|2 sin(t/2)| dt = -π`).
pub fn periodic_log_integral(samples: &[f64], s: f64, jet: Jet) -> f64 {
    let n = samples.len();
    let dt = TAU / n as f64;
    let mut total = 0.0;
    for (k, &f) in samples.iter().enumerate() {
        let d = k as f64 * dt - s;
        let chord = (2.0 * (0.5 * d).sin()).abs();
        if chord == 0.0 {
            continue;
        }
        let (sd, cd) = d.sin_cos();
        let remainder = f - jet.value - jet.first * sd - jet.second * (1.0 - cd);
        total += remainder * chord.ln();
    }
    total * dt + PI * jet.second
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        // degree 15 is exact
        let p: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((p - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn graded_rule_handles_log_endpoint() {
        let rule = GradedRule::default();
        let v = rule.integrate(|x| x.ln(), 0.0, 1.0);
        assert!((v + 1.0).abs() < 1e-12, "{v}");
        let v = rule.integrate(|x| x.ln().powi(2), 0.0, 1.0);
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn log_sin_identities() {
        let a = singular_quadrature_1d(SingularIntegral::LogSin);
        let b = singular_quadrature_1d(SingularIntegral::LogSinSquared);
        assert!((a + 1.088793045).abs() < 1e-6);
        assert!((a - SingularIntegral::LogSin.exact()).abs() < 1e-12);
        assert!((b - SingularIntegral::LogSinSquared.exact()).abs() < 1e-12);
        assert!((b - 2.046622).abs() < 1e-6);
        assert!(b >= a * a * 2.0 / PI);
    }

    #[test]
    fn periodic_log_integral_of_constant_vanishes() {
        let samples = vec![3.0; 256];
        let v = periodic_log_integral(
            &samples,
            0.37,
            Jet {
                value: 3.0,
                first: 0.0,
                second: 0.0,
            },
        );
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn periodic_log_integral_matches_fourier_series() {
        // f(t) = cos(2t) + 0.5 sin(3t): ∫ f log|2 sin((t-s)/2)| = -π Σ (a_k cos ks + b_k sin ks) / k
        let f = |t: f64| (2.0 * t).cos() + 0.5 * (3.0 * t).sin();
        let fp = |t: f64| -2.0 * (2.0 * t).sin() + 1.5 * (3.0 * t).cos();
        let fpp = |t: f64| -4.0 * (2.0 * t).cos() - 4.5 * (3.0 * t).sin();
        let s: f64 = 1.1;
        let exact = -PI * ((2.0 * s).cos() / 2.0 + 0.5 * (3.0 * s).sin() / 3.0);
        for n in [64, 512] {
            let samples: Vec<f64> = (0..n).map(|k| f(TAU * k as f64 / n as f64)).collect();
            let v = periodic_log_integral(
                &samples,
                s,
                Jet {
                    value: f(s),
                    first: fp(s),
                    second: fpp(s),
                },
            );
            assert!(
                (v - exact).abs() < if n == 64 { 1e-4 } else { 1e-8 },
                "{n}: {v} vs {exact}"
            );
        }
    }
}
