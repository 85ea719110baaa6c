//! Canonical harmonic maps for two boundary vortices of degree one.
//!
//! On the unit disk
//!
//! ```text
//! M(x; a) = (x - a₁)(x - a₂) |a₁ - a₂| / (|x - a₁| |x - a₂| (a₁ - a₂))
//! ```
//!
//! and on a conformal image `Ω = Φ(B₁)` the pushforward
//! `M*(w) = M(Ψ(w)) Φ'(Ψ(w)) / |Φ'(Ψ(w))|`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{angle_difference, wrap_angle, ComplexPoint, ConformalDomain, BOUNDARY_TOL};
use crate::poisson::GridSpec;

/// Minimal distance to a vortex at which the maps are still evaluated.
pub const SINGULARITY_RADIUS: f64 = 1e-12;

const COINCIDENCE_TOL: f64 = 1e-14;

/// Boundary vortices `a_j = e^{i s_j}` with multiplicities `d_j`, `Σ d_j = 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexConfig {
    angles: Vec<f64>,
    multiplicities: Vec<i32>,
}

impl VortexConfig {
    /// General configuration; angles are wrapped into `[0, 2π)`.
    pub fn new(angles: Vec<f64>, multiplicities: Vec<i32>) -> Result<Self> {
        if angles.is_empty() || angles.len() != multiplicities.len() {
            return Err(Error::UnsupportedConfiguration(format!(
                "{} angles for {} multiplicities",
                angles.len(),
                multiplicities.len()
            )));
        }
        if angles.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("vortex angles"));
        }
        let total: i32 = multiplicities.iter().sum();
        if total != 2 {
            return Err(Error::UnsupportedConfiguration(format!(
                "multiplicities must sum to 2, got {total}"
            )));
        }
        Ok(Self {
            angles: angles.into_iter().map(wrap_angle).collect(),
            multiplicities,
        })
    }

    /// Two vortices of degree one at `e^{i s₁}`, `e^{i s₂}`.
    pub fn pair(s1: f64, s2: f64) -> Result<Self> {
        Self::new(vec![s1, s2], vec![1, 1])
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn multiplicities(&self) -> &[i32] {
        &self.multiplicities
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn positions(&self) -> Vec<ComplexPoint> {
        self.angles.iter().map(|&s| Complex64::from_polar(1.0, s)).collect()
    }

    /// True when two vortices coincide modulo 2π.
    pub fn is_degenerate(&self) -> bool {
        let n = self.angles.len();
        (0..n).any(|i| (i + 1..n).any(|j| angle_difference(self.angles[i], self.angles[j]).abs() < COINCIDENCE_TOL))
    }

    /// True for exactly two vortices of degree one.
    pub fn is_dipole(&self) -> bool {
        self.multiplicities == [1, 1]
    }

    /// Smallest pairwise distance `|a_i - a_j|`.
    pub fn min_separation(&self) -> f64 {
        let p = self.positions();
        let mut best = f64::INFINITY;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                best = best.min((p[i] - p[j]).norm());
            }
        }
        best
    }

    /// `(a₁, a₂)` for a supported non-degenerate dipole.
    pub fn dipole_positions(&self) -> Result<(ComplexPoint, ComplexPoint)> {
        if !self.is_dipole() {
            return Err(Error::UnsupportedConfiguration(format!(
                "only two vortices with d = (1, 1) are supported, got d = {:?}",
                self.multiplicities
            )));
        }
        if self.is_degenerate() {
            return Err(Error::UnsupportedConfiguration("coincident vortices".to_string()));
        }
        let p = self.positions();
        Ok((p[0], p[1]))
    }

    /// The same configuration rotated by `beta`.
    pub fn rotated(&self, beta: f64) -> Self {
        Self {
            angles: self.angles.iter().map(|s| wrap_angle(s + beta)).collect(),
            multiplicities: self.multiplicities.clone(),
        }
    }
}

/// `M(·; a)` on the unit disk with the phase factor precomputed.
#[derive(Debug, Clone, Copy)]
pub struct CanonicalMap {
    a1: ComplexPoint,
    a2: ComplexPoint,
    phase: ComplexPoint,
}

impl CanonicalMap {
    pub fn new(config: &VortexConfig) -> Result<Self> {
        let (a1, a2) = config.dipole_positions()?;
        let diff = a1 - a2;
        Ok(Self {
            a1,
            a2,
            phase: diff.norm() / diff,
        })
    }

    pub fn vortices(&self) -> (ComplexPoint, ComplexPoint) {
        (self.a1, self.a2)
    }

    /// Distance from `x` to the nearer vortex.
    pub fn vortex_distance(&self, x: ComplexPoint) -> f64 {
        (x - self.a1).norm().min((x - self.a2).norm())
    }

    /// Checked evaluation at `x ∈ B̄₁`.
    pub fn eval(&self, x: ComplexPoint) -> Result<ComplexPoint> {
        if !(x.re.is_finite() && x.im.is_finite()) {
            return Err(Error::NonFinite("evaluation point"));
        }
        let modulus = x.norm();
        if modulus > 1.0 + BOUNDARY_TOL {
            return Err(Error::DomainViolation { modulus });
        }
        let distance = self.vortex_distance(x);
        if distance <= SINGULARITY_RADIUS {
            return Err(Error::Singularity { distance });
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub fn eval_unchecked(&self, x: ComplexPoint) -> ComplexPoint {
        let p = (x - self.a1) * (x - self.a2);
        p / p.norm() * self.phase
    }

    /// `M` at every node of a disk grid (nodes never touch the unit circle).
    pub fn sample_on_grid(&self, grid: &GridSpec) -> Vec<ComplexPoint> {
        let mut out = Vec::with_capacity(grid.len());
        for i in 0..grid.n_r() {
            for k in 0..grid.n_t() {
                out.push(self.eval_unchecked(grid.point(i, k)));
            }
        }
        out
    }
}

/// `M(x; a)` on the unit disk.
pub fn canonical_map_disk(a: &VortexConfig, x: ComplexPoint) -> Result<ComplexPoint> {
    CanonicalMap::new(a)?.eval(x)
}

/// `M*(w; Φ(a))` on the conformal image; identical to `M` on the disk.
pub fn pushforward_map(domain: &ConformalDomain, a: &VortexConfig, w: ComplexPoint) -> Result<ComplexPoint> {
    let map = CanonicalMap::new(a)?;
    pushforward_with(domain, &map, w)
}

pub(crate) fn pushforward_with(domain: &ConformalDomain, map: &CanonicalMap, w: ComplexPoint) -> Result<ComplexPoint> {
    if domain.is_disk() {
        return map.eval(w);
    }
    let z = domain.inverse(w)?;
    let m = map.eval(z)?;
    let d = domain.derivative(z);
    Ok(m * d / d.norm())
}

/// `∇φ*(x) = Σ_j d_j (x - a_j)^⊥ / |x - a_j|²`, the gradient of the harmonic lifting.
pub fn grad_phistar(a: &VortexConfig, x: ComplexPoint) -> Result<[f64; 2]> {
    let mut g = [0.0; 2];
    for (pos, &d) in a.positions().into_iter().zip(a.multiplicities()) {
        let v = x - pos;
        let r2 = v.norm_sqr();
        if r2.sqrt() <= SINGULARITY_RADIUS {
            return Err(Error::Singularity { distance: r2.sqrt() });
        }
        let d = d as f64;
        g[0] += -d * v.im / r2;
        g[1] += d * v.re / r2;
    }
    Ok(g)
}

#[inline]
pub(crate) fn grad_phistar_sq_unchecked(positions: &[ComplexPoint], degrees: &[f64], x: ComplexPoint) -> f64 {
    let mut gx = 0.0;
    let mut gy = 0.0;
    for (pos, d) in positions.iter().zip(degrees) {
        let v = x - pos;
        let r2 = v.norm_sqr();
        gx -= d * v.im / r2;
        gy += d * v.re / r2;
    }
    gx * gx + gy * gy
}

/// A unit-length vector field `x ↦ m(x) ∈ S¹`, complex-encoded.
pub trait UnitVectorField {
    fn direction(&self, w: ComplexPoint) -> Result<ComplexPoint>;

    /// Short description of what the field was built from.
    fn label(&self) -> String;
}

/// The canonical map of a domain, as a vector field.
#[derive(Debug, Clone)]
pub struct CanonicalField {
    domain: ConformalDomain,
    config: VortexConfig,
    map: CanonicalMap,
}

impl CanonicalField {
    pub fn new(domain: ConformalDomain, config: VortexConfig) -> Result<Self> {
        let map = CanonicalMap::new(&config)?;
        Ok(Self { domain, config, map })
    }

    pub fn config(&self) -> &VortexConfig {
        &self.config
    }
}

impl UnitVectorField for CanonicalField {
    fn direction(&self, w: ComplexPoint) -> Result<ComplexPoint> {
        pushforward_with(&self.domain, &self.map, w)
    }

    fn label(&self) -> String {
        format!(
            "canonical map, {:?} domain (c = {}), s = {:?}",
            self.domain.kind(),
            self.domain.coefficient(),
            self.config.angles()
        )
    }
}

/// Fraction of a full turn, useful for placing samples away from vortices.
pub fn angular_gap(config: &VortexConfig, t: f64) -> f64 {
    config
        .angles()
        .iter()
        .map(|&s| angle_difference(t, s).abs())
        .fold(TAU, f64::min)
}
