//! Complex-plane geometry: the unit disk and the conformal family
//! `Φ(z) = z / (1 - c z²)`, its inverse, and the parametrized boundary
//! `γ(t) = Φ(e^{it})` with its curvature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the complex plane (`x ∈ B₁`, `z ∈ ∂B₁` or `w ∈ Ω`).
pub type ComplexPoint = Complex64;

/// Slack allowed beyond the unit circle for points that should lie in the closed disk.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Coefficient of the oval used in the reference experiments.
pub const OVAL_COEFFICIENT: f64 = 0.2;

/// Coefficients at or above this value lose univalence/convexity guarantees.
pub const MAX_COEFFICIENT: f64 = 0.5;

const MIN_SPEED: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Disk,
    Conformal,
}

/// The unit disk or its image under `Φ(z) = z / (1 - c z²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalDomain {
    kind: DomainKind,
    coefficient: f64,
}

impl ConformalDomain {
    pub fn disk() -> Self {
        Self {
            kind: DomainKind::Disk,
            coefficient: 0.0,
        }
    }

    /// Conformal image with coefficient `c ∈ [0, 0.5)`.
    pub fn conformal(c: f64) -> Result<Self> {
        if !c.is_finite() || !(0.0..MAX_COEFFICIENT).contains(&c) {
            return Err(Error::InvalidParameter(format!(
                "conformal coefficient must lie in [0, {MAX_COEFFICIENT}), got {c}"
            )));
        }
        Ok(Self {
            kind: DomainKind::Conformal,
            coefficient: c,
        })
    }

    /// The oval `Φ(z) = z / (1 - 0.2 z²)`.
    pub fn oval() -> Self {
        Self {
            kind: DomainKind::Conformal,
            coefficient: OVAL_COEFFICIENT,
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn is_disk(&self) -> bool {
        self.kind == DomainKind::Disk
    }

    /// `Φ(z)`, rejecting points outside the closed unit disk.
    pub fn forward(&self, z: ComplexPoint) -> Result<ComplexPoint> {
        check_finite(z)?;
        let modulus = z.norm();
        if modulus > 1.0 + BOUNDARY_TOL {
            return Err(Error::DomainViolation { modulus });
        }
        Ok(self.map(z))
    }

    /// `Φ(z)` without the domain check.
    #[inline]
    pub fn map(&self, z: ComplexPoint) -> ComplexPoint {
        match self.kind {
            DomainKind::Disk => z,
            DomainKind::Conformal => z / (1.0 - self.coefficient * z * z),
        }
    }

    /// `Φ'(z) = (1 + c z²) / (1 - c z²)²`.
    #[inline]
    pub fn derivative(&self, z: ComplexPoint) -> ComplexPoint {
        match self.kind {
            DomainKind::Disk => Complex64::new(1.0, 0.0),
            DomainKind::Conformal => {
                let cz2 = self.coefficient * z * z;
                let den = 1.0 - cz2;
                (1.0 + cz2) / (den * den)
            }
        }
    }

    /// `Φ''(z) = 2 c z (3 + c z²) / (1 - c z²)³`.
    #[inline]
    pub fn second_derivative(&self, z: ComplexPoint) -> ComplexPoint {
        match self.kind {
            DomainKind::Disk => Complex64::new(0.0, 0.0),
            DomainKind::Conformal => {
                let c = self.coefficient;
                let cz2 = c * z * z;
                let den = 1.0 - cz2;
                2.0 * c * z * (3.0 + cz2) / (den * den * den)
            }
        }
    }

    /// `Ψ(w) = Φ⁻¹(w)`.
    ///
    /// Uses the rationalized root `2w / (1 + √(1 + 4 c w²))` (principal branch),
    /// which equals `(-1 + √(1 + 4 c w²)) / (2 c w)` and is regular at `w = 0`.
    pub fn inverse(&self, w: ComplexPoint) -> Result<ComplexPoint> {
        check_finite(w)?;
        let z = match self.kind {
            DomainKind::Disk => w,
            DomainKind::Conformal => {
                let root = (1.0 + 4.0 * self.coefficient * w * w).sqrt();
                let den = 1.0 + root;
                if den.norm() < f64::EPSILON {
                    return Err(Error::OutsideDomain { re: w.re, im: w.im });
                }
                2.0 * w / den
            }
        };
        if z.norm() > 1.0 + BOUNDARY_TOL {
            return Err(Error::OutsideDomain { re: w.re, im: w.im });
        }
        Ok(z)
    }

    /// Whether `w` lies in the closed domain.
    pub fn contains(&self, w: ComplexPoint) -> bool {
        self.inverse(w).is_ok()
    }

    /// `γ(t) = Φ(e^{it})`.
    pub fn boundary_point(&self, t: f64) -> ComplexPoint {
        self.map(Complex64::from_polar(1.0, t))
    }

    /// `γ'(t) = i z Φ'(z)` with `z = e^{it}`.
    pub fn boundary_velocity(&self, t: f64) -> ComplexPoint {
        let z = Complex64::from_polar(1.0, t);
        Complex64::i() * z * self.derivative(z)
    }

    /// `γ''(t) = -z Φ'(z) - z² Φ''(z)`.
    pub fn boundary_acceleration(&self, t: f64) -> ComplexPoint {
        let z = Complex64::from_polar(1.0, t);
        -z * self.derivative(z) - z * z * self.second_derivative(z)
    }

    /// Signed curvature `κ(t) = Im(γ'' · conj γ') / |γ'|³` of the boundary.
    pub fn curvature(&self, t: f64) -> Result<f64> {
        let v = self.boundary_velocity(t);
        let speed = v.norm();
        if speed.is_nan() || speed < MIN_SPEED {
            return Err(Error::DegenerateMap { t, speed });
        }
        let a = self.boundary_acceleration(t);
        Ok((a * v.conj()).im / (speed * speed * speed))
    }

    /// `κ(γ(t)) |γ'(t)|`, the rate of turning of the tangent, `1 + Re(z Φ''/Φ')`.
    pub fn turning_density(&self, t: f64) -> f64 {
        match self.kind {
            DomainKind::Disk => 1.0,
            DomainKind::Conformal => {
                let z = Complex64::from_polar(1.0, t);
                1.0 + (z * self.second_derivative(z) / self.derivative(z)).re
            }
        }
    }

    /// `(f, f', f'')` for `f(t) = κ|γ'|` in closed form.
    ///
    /// With `u = c e^{2it}`, `f = 1 + Re q(u)` where `q(u) = 2u(3 + u) / (1 - u²)`.
    pub fn turning_density_jet(&self, t: f64) -> (f64, f64, f64) {
        match self.kind {
            DomainKind::Disk => (1.0, 0.0, 0.0),
            DomainKind::Conformal => {
                let u = self.coefficient * Complex64::from_polar(1.0, 2.0 * t);
                let one_minus = 1.0 - u * u;
                let q = 2.0 * u * (3.0 + u) / one_minus;
                let dq = 2.0 * (3.0 + 2.0 * u + 3.0 * u * u) / (one_minus * one_minus);
                let ddq = (4.0 + 36.0 * u + 12.0 * u * u + 12.0 * u * u * u) / (one_minus * one_minus * one_minus);
                let i = Complex64::i();
                let f1 = (2.0 * i * u * dq).re;
                let f2 = (-4.0 * u * dq - 4.0 * u * u * ddq).re;
                (1.0 + q.re, f1, f2)
            }
        }
    }

    /// Outward unit normal at `γ(t)`.
    pub fn outward_normal(&self, t: f64) -> ComplexPoint {
        let v = self.boundary_velocity(t);
        -Complex64::i() * v / v.norm()
    }
}

impl Default for ConformalDomain {
    fn default() -> Self {
        Self::disk()
    }
}

fn check_finite(z: ComplexPoint) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("complex point"))
    }
}

/// Wrap an angle into `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let w = t.rem_euclid(two_pi);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= two_pi {
        0.0
    } else {
        w
    }
}

/// Signed difference `a - b` reduced to `(-π, π]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    if d > pi {
        d - std::f64::consts::TAU
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn forward_examples() {
        let oval = ConformalDomain::oval();
        assert_eq!(
            oval.forward(Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let w = oval.forward(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(w.re, 1.25, epsilon = 1e-15);
        assert_eq!(w.im, 0.0);
        let z = Complex64::new(0.3, 0.2);
        assert_eq!(ConformalDomain::disk().forward(z).unwrap(), z);
    }

    #[test]
    fn forward_rejects_outside_points() {
        let err = ConformalDomain::oval().forward(Complex64::new(1.0 + 1e-9, 0.0));
        assert!(matches!(err, Err(Error::DomainViolation { .. })));
        assert!(ConformalDomain::oval()
            .forward(Complex64::new(1.0 + 1e-13, 0.0))
            .is_ok());
        assert!(ConformalDomain::disk().forward(Complex64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn inverse_examples() {
        let oval = ConformalDomain::oval();
        assert_eq!(
            oval.inverse(Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let z = oval.inverse(Complex64::new(1.25, 0.0)).unwrap();
        assert_relative_eq!(z.re, 1.0, epsilon = 1e-15);
        assert!(oval.inverse(Complex64::new(1.3, 0.0)).is_err());
        assert!(oval.inverse(Complex64::new(0.0, 0.9)).is_err());
        assert!(ConformalDomain::disk().inverse(Complex64::new(0.0, 1.01)).is_err());
    }

    #[test]
    fn inverse_matches_printed_formula() {
        let oval = ConformalDomain::oval();
        let w = Complex64::new(0.7, 0.3);
        let printed = (-1.0 + (1.0 + 0.8 * w * w).sqrt()) / (0.4 * w);
        let z = oval.inverse(w).unwrap();
        assert!((z - printed).norm() < 1e-14);
    }

    #[test]
    fn coefficient_range_is_enforced() {
        assert!(ConformalDomain::conformal(0.5).is_err());
        assert!(ConformalDomain::conformal(-0.1).is_err());
        assert!(ConformalDomain::conformal(0.0).is_ok());
        assert!(ConformalDomain::conformal(0.45).is_ok());
    }

    #[test]
    fn disk_curvature_is_one() {
        let disk = ConformalDomain::disk();
        for k in 0..32 {
            let t = TAU * k as f64 / 32.0;
            assert_relative_eq!(disk.curvature(t).unwrap(), 1.0, epsilon = 1e-14);
            let n = disk.outward_normal(t);
            assert!((n - Complex64::from_polar(1.0, t)).norm() < 1e-14);
        }
    }

    #[test]
    fn oval_curvature_matches_finite_differences() {
        let oval = ConformalDomain::oval();
        let h = 1e-4;
        for &t in &[0.0, 0.4, PI / 2.0, 2.0] {
            let g = |s: f64| oval.boundary_point(s);
            let d1 = (g(t + h) - g(t - h)) / (2.0 * h);
            let d2 = (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h);
            let fd = (d2 * d1.conj()).im / d1.norm().powi(3);
            let k = oval.curvature(t).unwrap();
            assert!(((k - fd) / k).abs() < 1e-6, "t={t}: {k} vs {fd}");
        }
    }

    #[test]
    fn total_turning_is_two_pi() {
        for domain in [ConformalDomain::disk(), ConformalDomain::oval()] {
            let n = 4096;
            let dt = TAU / n as f64;
            let total: f64 = (0..n)
                .map(|k| {
                    let t = k as f64 * dt;
                    domain.curvature(t).unwrap() * domain.boundary_velocity(t).norm()
                })
                .sum::<f64>()
                * dt;
            assert!((total - TAU).abs() < 1e-8, "{total}");
        }
    }

    #[test]
    fn turning_density_matches_curvature_times_speed() {
        let oval = ConformalDomain::conformal(0.35).unwrap();
        for k in 0..50 {
            let t = 0.13 * k as f64;
            let direct = oval.curvature(t).unwrap() * oval.boundary_velocity(t).norm();
            assert_relative_eq!(oval.turning_density(t), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn turning_jet_matches_finite_differences() {
        let oval = ConformalDomain::oval();
        let h = 1e-3;
        for k in 0..20 {
            let t = 0.31 * k as f64;
            let (f, f1, f2) = oval.turning_density_jet(t);
            let g = |s: f64| oval.turning_density(s);
            assert_relative_eq!(f, g(t), epsilon = 1e-13);
            let d1 = (g(t - 2.0 * h) - 8.0 * g(t - h) + 8.0 * g(t + h) - g(t + 2.0 * h)) / (12.0 * h);
            let d2 =
                (-g(t - 2.0 * h) + 16.0 * g(t - h) - 30.0 * g(t) + 16.0 * g(t + h) - g(t + 2.0 * h)) / (12.0 * h * h);
            assert!((f1 - d1).abs() < 1e-8, "t={t}: {f1} vs {d1}");
            assert!((f2 - d2).abs() < 1e-6, "t={t}: {f2} vs {d2}");
        }
    }

    #[test]
    fn conformality_on_polar_sample() {
        let oval = ConformalDomain::oval();
        for i in 0..=64 {
            for k in 0..64 {
                let z = Complex64::from_polar(i as f64 / 64.0, TAU * k as f64 / 64.0);
                assert!(oval.derivative(z).norm() > 0.1);
            }
        }
    }

    #[test]
    fn oval_symmetries() {
        let oval = ConformalDomain::oval();
        for k in 0..40 {
            let z = Complex64::from_polar(0.9 * (k as f64 / 40.0), 0.37 * k as f64);
            assert!((oval.map(z.conj()) - oval.map(z).conj()).norm() < 1e-15);
            assert!((oval.map(-z) + oval.map(z)).norm() < 1e-15);
            let t = 0.21 * k as f64;
            let a = oval.curvature(wrap_angle(-t)).unwrap();
            assert_relative_eq!(a, oval.curvature(t).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn wrapping_helpers() {
        assert_eq!(wrap_angle(-1e-300), 0.0);
        assert_relative_eq!(wrap_angle(-PI / 2.0), 1.5 * PI);
        assert_relative_eq!(wrap_angle(7.0), 7.0 - TAU);
        assert_relative_eq!(angle_difference(0.1, TAU - 0.1), 0.2, epsilon = 1e-15);
        assert_relative_eq!(angle_difference(TAU - 0.1, 0.1), -0.2, epsilon = 1e-15);
    }
}
