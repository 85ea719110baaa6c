//! Unperturbed renormalized energy `W_{Ω;0}` and the functional `G_{Ω;h}(a; θ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{grad_phistar_sq_unchecked, CanonicalMap, VortexConfig};
use crate::error::{Error, Result};
use crate::geom::ConformalDomain;
use crate::micromag::ExternalField;
use crate::poisson::{gradient_energy, GridSpec, PolarField};
use crate::quadrature::{periodic_log_integral, Jet};

/// Default number of boundary nodes for the conformal correction integral.
pub const DEFAULT_BOUNDARY_NODES: usize = 1024;

/// Solver diagnostics attached to an energy evaluation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyDiagnostics {
    pub picard_iterations: usize,
    pub picard_converged: bool,
    /// `‖L θ - f(θ)‖_∞` at the returned iterate.
    pub residual: f64,
    pub boundary_nodes: usize,
    pub grid_nodes: usize,
}

/// `W = W₀ + V` with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub w0: f64,
    pub v_ext: f64,
    pub total: f64,
    pub diagnostics: EnergyDiagnostics,
}

impl EnergyBreakdown {
    pub fn new(w0: f64, v_ext: f64, diagnostics: EnergyDiagnostics) -> Self {
        Self {
            w0,
            v_ext,
            total: w0 + v_ext,
            diagnostics,
        }
    }

    /// Degenerate configuration: infinite energy, field term skipped.
    pub fn infinite() -> Self {
        Self::new(f64::INFINITY, 0.0, EnergyDiagnostics::default())
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite()
    }
}

/// `W_{B₁;0}(a) = -π log|a₁ - a₂|`; `+∞` for coincident vortices.
pub fn w0_disk(a: &VortexConfig) -> Result<f64> {
    if !a.is_dipole() {
        return Err(Error::UnsupportedConfiguration(format!(
            "renormalized energy needs d = (1, 1), got {:?}",
            a.multiplicities()
        )));
    }
    if a.is_degenerate() {
        return Ok(f64::INFINITY);
    }
    let p = a.positions();
    let dist = (p[0] - p[1]).norm();
    if dist == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-PI * dist.ln())
}

/// Boundary samples of `κ|Φ'|` and the vortex-independent part of the
/// correction integral, reusable across vortex positions.
#[derive(Debug, Clone)]
pub struct BoundaryQuadrature {
    domain: ConformalDomain,
    turning: Vec<f64>,
    log_speed_term: f64,
}

impl BoundaryQuadrature {
    /// `nodes` must be a power of two, at least 64.
    pub fn new(domain: ConformalDomain, nodes: usize) -> Result<Self> {
        if nodes < 64 || !nodes.is_power_of_two() {
            return Err(Error::Precondition(format!(
                "boundary node count must be a power of two >= 64, got {nodes}"
            )));
        }
        let dt = std::f64::consts::TAU / nodes as f64;
        let turning: Vec<f64> = (0..nodes).map(|k| domain.turning_density(k as f64 * dt)).collect();
        let log_speed_term = if domain.is_disk() {
            0.0
        } else {
            turning
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let z = Complex64::from_polar(1.0, k as f64 * dt);
                    f * domain.derivative(z).norm().ln()
                })
                .sum::<f64>()
                * dt
        };
        Ok(Self {
            domain,
            turning,
            log_speed_term,
        })
    }

    pub fn nodes(&self) -> usize {
        self.turning.len()
    }

    pub fn domain(&self) -> &ConformalDomain {
        &self.domain
    }

    /// `∮ κ(Φ(z))|Φ'(z)| log|z - e^{is}| dH¹(z)`.
    pub fn log_moment(&self, s: f64) -> f64 {
        let (value, first, second) = self.domain.turning_density_jet(s);
        periodic_log_integral(&self.turning, s, Jet { value, first, second })
    }

    /// `W_{Ω;0}(a)`.
    pub fn w0(&self, a: &VortexConfig) -> Result<f64> {
        let base = w0_disk(a)?;
        if !base.is_finite() {
            return Ok(base);
        }
        let correction: f64 = a.angles().iter().map(|&s| self.log_moment(s)).sum::<f64>() + self.log_speed_term;
        Ok(base + 0.5 * correction)
    }
}

/// `W_{Ω;0}(a) = -π log|a₁ - a₂| + ½ ∮ κ|Φ'| (log|z - a₁| + log|z - a₂| + log|Φ'|) dH¹`.
pub fn w0_conformal(domain: &ConformalDomain, a: &VortexConfig, nodes: usize) -> Result<f64> {
    BoundaryQuadrature::new(*domain, nodes)?.w0(a)
}

/// `W_{Ω;0}` dispatched on the domain kind.
pub fn w0(domain: &ConformalDomain, a: &VortexConfig, nodes: usize) -> Result<f64> {
    if domain.is_disk() {
        w0_disk(a)
    } else {
        w0_conformal(domain, a, nodes)
    }
}

// Leaf-size controls of the punctured-domain quadrature.
const RELATIVE_CELL_SIZE: f64 = 1.0 / 32.0;
const NEAR_FIELD_DIVISOR: f64 = 8.0;
const STRADDLE_DIVISOR: f64 = 1024.0;
const MAX_DEPTH: u32 = 40;

struct PuncturedIntegrand {
    positions: Vec<Complex64>,
    degrees: Vec<f64>,
    rho: f64,
}

impl PuncturedIntegrand {
    fn cell(&self, r0: f64, r1: f64, t0: f64, t1: f64, depth: u32) -> f64 {
        let rc = 0.5 * (r0 + r1);
        let tc = 0.5 * (t0 + t1);
        let center = Complex64::from_polar(rc, tc);
        // bounds the distance from the center to any point of the cell
        let reach = 0.5 * ((r1 - r0) + r1 * (t1 - t0));
        let size = 2.0 * reach;

        let mut dmin = f64::INFINITY;
        let mut straddles = false;
        let mut center_inside = false;
        for p in &self.positions {
            let d = (center - p).norm();
            if d + reach <= self.rho {
                return 0.0;
            }
            if (d - self.rho).abs() < reach {
                straddles = true;
            }
            center_inside |= d < self.rho;
            dmin = dmin.min(d);
        }

        let split = if straddles {
            size > self.rho / STRADDLE_DIVISOR
        } else {
            let near = dmin < 4.0 * self.rho + reach;
            size > RELATIVE_CELL_SIZE * (dmin - reach).max(self.rho) || (near && size > self.rho / NEAR_FIELD_DIVISOR)
        };

        if split && depth < MAX_DEPTH {
            let rm = rc;
            let tm = tc;
            return self.cell(r0, rm, t0, tm, depth + 1)
                + self.cell(r0, rm, tm, t1, depth + 1)
                + self.cell(rm, r1, t0, tm, depth + 1)
                + self.cell(rm, r1, tm, t1, depth + 1);
        }
        if center_inside {
            return 0.0;
        }
        let area = rc * (r1 - r0) * (t1 - t0);
        grad_phistar_sq_unchecked(&self.positions, &self.degrees, center) * area
    }
}

/// `∫_{B₁ ∖ ∪ B_ρ(a_j)} |∇φ*|² dx` by adaptive midpoint cells.
///
/// Starts from the cells of `grid` and splits (in `r` and `t`) cells that are
/// large relative to their distance from the vortices, cells within `4ρ` of a
/// vortex that are wider than `ρ/8`, and cells cut by an exclusion circle down
/// to `ρ/1024`. A leaf counts iff its center lies outside every `B_ρ(a_j)`.
pub fn punctured_energy(a: &VortexConfig, rho: f64, grid: GridSpec) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Precondition(format!("rho must be positive, got {rho}")));
    }
    if a.is_degenerate() {
        return Err(Error::Precondition("coincident vortices".into()));
    }
    if a.len() > 1 && rho >= 0.5 * a.min_separation() {
        return Err(Error::Precondition(format!(
            "rho = {rho} exceeds half the minimal vortex separation {}",
            a.min_separation()
        )));
    }
    let integrand = PuncturedIntegrand {
        positions: a.positions(),
        degrees: a.multiplicities().iter().map(|&d| d as f64).collect(),
        rho,
    };
    let (dr, dt) = (grid.dr(), grid.dt());
    let partials: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, k) = (idx / grid.n_t(), idx % grid.n_t());
            integrand.cell(
                i as f64 * dr,
                (i + 1) as f64 * dr,
                k as f64 * dt,
                (k + 1) as f64 * dt,
                0,
            )
        })
        .collect();
    Ok(pairwise_sum(&partials))
}

/// `punctured_energy(ρ) - π N log(1/ρ)`, the finite part whose limit is `W₀`.
pub fn punctured_renormalized(a: &VortexConfig, rho: f64, grid: GridSpec) -> Result<f64> {
    let e = punctured_energy(a, rho, grid)?;
    Ok(e - PI * a.len() as f64 * (1.0 / rho).ln())
}

pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let (l, r) = values.split_at(values.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Discrete `G(θ) = ½∫|∇θ|² - ∫ h·(e^{iθ} M)` with `M` sampled on the nodes.
pub fn g_functional_sampled(theta: &PolarField, m_nodes: &[Complex64], h: &ExternalField) -> f64 {
    let grid = theta.grid();
    let hv = h.vector();
    let coupling: Vec<f64> = theta
        .values()
        .chunks(grid.n_t())
        .zip(m_nodes.chunks(grid.n_t()))
        .enumerate()
        .map(|(i, (ring, m))| {
            let s: f64 = ring
                .iter()
                .zip(m)
                .map(|(&th, &m)| {
                    let v = Complex64::from_polar(1.0, th) * m;
                    hv.re * v.re + hv.im * v.im
                })
                .sum();
            grid.weight(i) * s
        })
        .collect();
    gradient_energy(theta) - coupling.iter().sum::<f64>()
}

/// `G_{Ω;h}(a; θ)` on the disk grid of `theta`.
pub fn g_functional(a: &VortexConfig, theta: &PolarField, h: &ExternalField) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let map = CanonicalMap::new(a)?;
    let m = map.sample_on_grid(&theta.grid());
    Ok(g_functional_sampled(theta, &m, h))
}
