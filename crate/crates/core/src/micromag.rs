//! External-field correction and magnetization assembly.
//!
//! `θ` minimizes `G(θ) = ∫ ½|∇θ|² - h·(e^{iθ} M)` over functions vanishing on
//! the unit circle. Its Euler–Lagrange equation `-Δθ = h·(i e^{iθ} M)` is solved
//! by the Picard iteration `θ₀ = 0`, `θ_{n+1} = (-Δ)⁻¹ [h·(i e^{iθ_n} M)]`.
//! On a conformal image the same disk `θ` is composed with `Ψ`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::{pushforward_with, CanonicalMap, UnitVectorField, VortexConfig};
use crate::error::{Error, Result};
use crate::geom::{wrap_angle, ComplexPoint, ConformalDomain};
use crate::poisson::{apply_negative_laplacian, DiskPoisson, GridSpec, PolarField};
use crate::renorm::{
    g_functional_sampled, w0_disk, BoundaryQuadrature, EnergyBreakdown, EnergyDiagnostics, DEFAULT_BOUNDARY_NODES,
};

/// Default smallness bound on `|h|`.
pub const DEFAULT_FIELD_BOUND: f64 = 0.5;

/// Constant in-plane field `h = (h₁, h₂)` with a smallness guard `|h| ≤ h_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalField {
    h1: f64,
    h2: f64,
    bound: f64,
}

impl ExternalField {
    pub fn new(h1: f64, h2: f64) -> Result<Self> {
        Self::with_bound(h1, h2, DEFAULT_FIELD_BOUND)
    }

    pub fn with_bound(h1: f64, h2: f64, bound: f64) -> Result<Self> {
        if !(h1.is_finite() && h2.is_finite() && bound.is_finite()) {
            return Err(Error::NonFinite("external field"));
        }
        let magnitude = h1.hypot(h2);
        if magnitude > bound {
            return Err(Error::InvalidParameter(format!(
                "|h| = {magnitude} exceeds the bound {bound}"
            )));
        }
        Ok(Self { h1, h2, bound })
    }

    pub fn zero() -> Self {
        Self {
            h1: 0.0,
            h2: 0.0,
            bound: DEFAULT_FIELD_BOUND,
        }
    }

    /// `h` encoded as `h₁ + i h₂`.
    pub fn vector(&self) -> Complex64 {
        Complex64::new(self.h1, self.h2)
    }

    pub fn components(&self) -> [f64; 2] {
        [self.h1, self.h2]
    }

    pub fn magnitude(&self) -> f64 {
        self.h1.hypot(self.h2)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.h1 == 0.0 && self.h2 == 0.0
    }

    /// `ε h` with the same bound.
    pub fn scaled(&self, eps: f64) -> Result<Self> {
        Self::with_bound(eps * self.h1, eps * self.h2, self.bound)
    }
}

impl Default for ExternalField {
    fn default() -> Self {
        Self::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    /// Stop once `‖θ_{n+1} - θ_n‖_∞` drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub iterations: usize,
    /// `‖θ_{n+1} - θ_n‖_∞` for every iteration.
    pub changes: Vec<f64>,
    /// `‖L θ - f(θ)‖_∞` at the returned iterate.
    pub residual: f64,
    pub converged: bool,
}

/// `f(θ) = h·(i e^{iθ} M)` at every node.
pub(crate) fn picard_rhs(theta: &PolarField, m_nodes: &[Complex64], h: &ExternalField) -> PolarField {
    let hv = h.vector();
    let values = theta
        .values()
        .iter()
        .zip(m_nodes)
        .map(|(&th, &m)| {
            let v = Complex64::from_polar(1.0, th) * m;
            // i v = (-v.im, v.re)
            -hv.re * v.im + hv.im * v.re
        })
        .collect();
    PolarField::from_values(theta.grid(), values).expect("grid sizes agree")
}

/// Picard solver bound to one grid.
#[derive(Debug)]
pub struct ThetaSolver {
    poisson: DiskPoisson,
}

impl ThetaSolver {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            poisson: DiskPoisson::new(grid),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.poisson.grid()
    }

    pub fn solve(
        &self,
        a: &VortexConfig,
        h: &ExternalField,
        opts: &PicardOptions,
    ) -> Result<(PolarField, FixedPointReport)> {
        let map = CanonicalMap::new(a)?;
        let m = map.sample_on_grid(&self.grid());
        self.solve_sampled(&m, h, opts)
    }

    /// Iterate with `M` already sampled on the grid nodes.
    pub fn solve_sampled(
        &self,
        m_nodes: &[Complex64],
        h: &ExternalField,
        opts: &PicardOptions,
    ) -> Result<(PolarField, FixedPointReport)> {
        if opts.tol.is_nan() || opts.tol <= 0.0 || opts.max_iter == 0 {
            return Err(Error::InvalidParameter(format!(
                "Picard options need tol > 0 and max_iter >= 1, got {opts:?}"
            )));
        }
        if h.magnitude() > h.bound() {
            return Err(Error::InvalidParameter("external field exceeds its bound".into()));
        }
        let grid = self.grid();
        let mut theta = PolarField::zeros(grid);
        let mut changes = Vec::new();
        let mut converged = false;
        for _ in 0..opts.max_iter {
            let rhs = picard_rhs(&theta, m_nodes, h);
            let next = self.poisson.solve(&rhs)?;
            let change = next.max_abs_diff(&theta);
            changes.push(change);
            theta = next;
            if change < opts.tol {
                converged = true;
                break;
            }
        }
        let residual = euler_lagrange_residual(&theta, m_nodes, h);
        Ok((
            theta,
            FixedPointReport {
                iterations: changes.len(),
                changes,
                residual,
                converged,
            },
        ))
    }
}

/// `‖L θ - h·(i e^{iθ} M)‖_∞`.
pub fn euler_lagrange_residual(theta: &PolarField, m_nodes: &[Complex64], h: &ExternalField) -> f64 {
    apply_negative_laplacian(theta).max_abs_diff(&picard_rhs(theta, m_nodes, h))
}

/// Picard iteration from `θ₀ = 0`; non-convergence is reported, not raised.
pub fn picard_solve(
    a: &VortexConfig,
    h: &ExternalField,
    grid: GridSpec,
    tol: f64,
    max_iter: usize,
) -> Result<(PolarField, FixedPointReport)> {
    ThetaSolver::new(grid).solve(a, h, &PicardOptions { tol, max_iter })
}

/// `V(a; h) = min_θ G(a; θ)`, evaluated at the Picard fixed point.
pub fn v_external(
    a: &VortexConfig,
    h: &ExternalField,
    grid: GridSpec,
    opts: &PicardOptions,
) -> Result<(f64, FixedPointReport)> {
    let solver = ThetaSolver::new(grid);
    let map = CanonicalMap::new(a)?;
    let m = map.sample_on_grid(&grid);
    v_external_sampled(&solver, &m, h, opts)
}

fn v_external_sampled(
    solver: &ThetaSolver,
    m: &[Complex64],
    h: &ExternalField,
    opts: &PicardOptions,
) -> Result<(f64, FixedPointReport)> {
    if h.is_zero() {
        // θ = 0 is the minimizer and both terms of G vanish
        let report = FixedPointReport {
            iterations: 1,
            changes: vec![0.0],
            residual: 0.0,
            converged: true,
        };
        return Ok((0.0, report));
    }
    let (theta, report) = solver.solve_sampled(m, h, opts)?;
    if !report.converged {
        return Err(Error::NotConverged {
            iterations: report.iterations,
            last_change: report.changes.last().copied().unwrap_or(f64::NAN),
        });
    }
    Ok((g_functional_sampled(&theta, m, h), report))
}

/// Everything needed to evaluate `W_{Ω;h}` repeatedly for varying vortex angles.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    domain: ConformalDomain,
    field: ExternalField,
    picard: PicardOptions,
    boundary: Option<BoundaryQuadrature>,
    solver: Arc<ThetaSolver>,
}

impl EnergyModel {
    pub fn new(domain: ConformalDomain, field: ExternalField, grid: GridSpec) -> Result<Self> {
        let boundary = if domain.is_disk() {
            None
        } else {
            Some(BoundaryQuadrature::new(domain, DEFAULT_BOUNDARY_NODES)?)
        };
        Ok(Self {
            domain,
            field,
            picard: PicardOptions::default(),
            boundary,
            solver: Arc::new(ThetaSolver::new(grid)),
        })
    }

    pub fn with_picard(mut self, picard: PicardOptions) -> Self {
        self.picard = picard;
        self
    }

    pub fn with_boundary_nodes(mut self, nodes: usize) -> Result<Self> {
        if !self.domain.is_disk() {
            self.boundary = Some(BoundaryQuadrature::new(self.domain, nodes)?);
        }
        Ok(self)
    }

    pub fn domain(&self) -> &ConformalDomain {
        &self.domain
    }

    pub fn field(&self) -> &ExternalField {
        &self.field
    }

    pub fn grid(&self) -> GridSpec {
        self.solver.grid()
    }

    pub fn picard(&self) -> &PicardOptions {
        &self.picard
    }

    pub fn solver(&self) -> &ThetaSolver {
        &self.solver
    }

    pub fn w0(&self, a: &VortexConfig) -> Result<f64> {
        match &self.boundary {
            Some(b) => b.w0(a),
            None => w0_disk(a),
        }
    }

    /// `W₀ + V`; degenerate configurations give `+∞` with `V` skipped.
    pub fn evaluate(&self, a: &VortexConfig) -> Result<EnergyBreakdown> {
        let w0 = self.w0(a)?;
        if !w0.is_finite() {
            return Ok(EnergyBreakdown::infinite());
        }
        let map = CanonicalMap::new(a)?;
        let m = map.sample_on_grid(&self.grid());
        let (v, report) = v_external_sampled(&self.solver, &m, &self.field, &self.picard)?;
        let diagnostics = EnergyDiagnostics {
            picard_iterations: report.iterations,
            picard_converged: report.converged,
            residual: report.residual,
            boundary_nodes: self.boundary.as_ref().map_or(0, |b| b.nodes()),
            grid_nodes: self.grid().len(),
        };
        Ok(EnergyBreakdown::new(w0, v, diagnostics))
    }

    pub fn energy_at(&self, s: [f64; 2]) -> Result<EnergyBreakdown> {
        self.evaluate(&VortexConfig::pair(s[0], s[1])?)
    }

    /// Total energy as an objective; any failure maps to `+∞`.
    pub fn objective(&self, s: [f64; 2]) -> f64 {
        match self.energy_at(s) {
            Ok(e) if !e.total.is_nan() => e.total,
            _ => f64::INFINITY,
        }
    }

    /// Disk `θ` for the configuration.
    pub fn solve_theta(&self, a: &VortexConfig) -> Result<(PolarField, FixedPointReport)> {
        if self.field.is_zero() {
            let (theta, report) = self
                .solver
                .solve(a, &self.field, &PicardOptions { tol: 1.0, max_iter: 1 })?;
            return Ok((
                theta,
                FixedPointReport {
                    converged: true,
                    ..report
                },
            ));
        }
        self.solver.solve(a, &self.field, &self.picard)
    }
}

/// `W_{Ω;h}(a) = W_{Ω;0}(a) + V_{Ω;h}(a)` with default solver settings.
pub fn total_energy(
    domain: &ConformalDomain,
    a: &VortexConfig,
    h: &ExternalField,
    grid: GridSpec,
) -> Result<EnergyBreakdown> {
    EnergyModel::new(*domain, *h, grid)?.evaluate(a)
}

/// Bilinear interpolation of a disk field in `(r, t)`, zero on the unit circle.
#[derive(Debug, Clone)]
pub struct ThetaInterpolant {
    theta: PolarField,
    pole: f64,
}

impl ThetaInterpolant {
    pub fn new(theta: PolarField) -> Self {
        let grid = theta.grid();
        let pole = (0..grid.n_t()).map(|k| theta.get(0, k)).sum::<f64>() / grid.n_t() as f64;
        Self { theta, pole }
    }

    fn ring(&self, i: usize, t: f64) -> f64 {
        let grid = self.theta.grid();
        let n_t = grid.n_t();
        let u = wrap_angle(t) / grid.dt();
        let k0 = (u.floor() as usize) % n_t;
        let k1 = (k0 + 1) % n_t;
        let w = u - u.floor();
        (1.0 - w) * self.theta.get(i, k0) + w * self.theta.get(i, k1)
    }

    pub fn eval(&self, z: ComplexPoint) -> f64 {
        let grid = self.theta.grid();
        let r = z.norm().min(1.0);
        let t = z.arg();
        let first = grid.radius(0);
        let last = grid.radius(grid.n_r() - 1);
        if r <= first {
            let inner = self.ring(0, t);
            return self.pole + (inner - self.pole) * r / first;
        }
        if r >= last {
            return self.ring(grid.n_r() - 1, t) * (1.0 - r) / (1.0 - last);
        }
        let u = r / grid.dr() - 0.5;
        let i = (u.floor() as usize).min(grid.n_r() - 2);
        let w = u - i as f64;
        (1.0 - w) * self.ring(i, t) + w * self.ring(i + 1, t)
    }
}

/// `m* = e^{iθ(Ψ(w))} M*(w)`.
#[derive(Debug, Clone)]
pub struct Magnetization {
    domain: ConformalDomain,
    config: VortexConfig,
    map: CanonicalMap,
    theta: ThetaInterpolant,
}

impl Magnetization {
    pub fn new(domain: ConformalDomain, config: VortexConfig, theta: PolarField) -> Result<Self> {
        let map = CanonicalMap::new(&config)?;
        Ok(Self {
            domain,
            config,
            map,
            theta: ThetaInterpolant::new(theta),
        })
    }

    pub fn config(&self) -> &VortexConfig {
        &self.config
    }

    pub fn theta_at(&self, w: ComplexPoint) -> Result<f64> {
        Ok(self.theta.eval(self.domain.inverse(w)?))
    }
}

impl UnitVectorField for Magnetization {
    fn direction(&self, w: ComplexPoint) -> Result<ComplexPoint> {
        let canonical = pushforward_with(&self.domain, &self.map, w)?;
        let z = self.domain.inverse(w)?;
        Ok(Complex64::from_polar(1.0, self.theta.eval(z)) * canonical)
    }

    fn label(&self) -> String {
        format!(
            "magnetization, {:?} domain (c = {}), s = {:?}",
            self.domain.kind(),
            self.domain.coefficient(),
            self.config.angles()
        )
    }
}

/// Where to sample the magnetization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SampleSpec {
    /// The center plus `rings` circles `|z| = j / rings` (the outermost pulled
    /// in to `1 - 1e-9`), each with `spokes` equally spaced points, mapped by `Φ`.
    PolarLattice { rings: usize, spokes: usize },
    /// Explicit points of the physical domain.
    Points(Vec<ComplexPoint>),
}

impl SampleSpec {
    pub fn points(&self, domain: &ConformalDomain) -> Vec<ComplexPoint> {
        match self {
            SampleSpec::Points(p) => p.clone(),
            SampleSpec::PolarLattice { rings, spokes } => {
                let mut out = vec![Complex64::new(0.0, 0.0)];
                for j in 1..=*rings {
                    let r = if j == *rings {
                        1.0 - 1e-9
                    } else {
                        j as f64 / *rings as f64
                    };
                    for k in 0..*spokes {
                        let t = std::f64::consts::TAU * k as f64 / *spokes as f64;
                        out.push(domain.map(Complex64::from_polar(r, t)));
                    }
                }
                out
            }
        }
    }
}

/// Position and unit magnetization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VectorFieldSample {
    pub x: f64,
    pub y: f64,
    pub mx: f64,
    pub my: f64,
}

#[derive(Debug, Clone)]
pub struct FieldSamples {
    pub samples: Vec<VectorFieldSample>,
    /// Points outside the domain or on a vortex.
    pub skipped: usize,
    pub report: FixedPointReport,
}

/// Evaluate `m*` at the requested points, skipping those outside the domain.
pub fn magnetization_field(
    domain: &ConformalDomain,
    a: &VortexConfig,
    h: &ExternalField,
    grid: GridSpec,
    sample: &SampleSpec,
) -> Result<FieldSamples> {
    let model = EnergyModel::new(*domain, *h, grid)?;
    sample_magnetization(&model, a, sample)
}

/// As [`magnetization_field`], reusing a model's solver and options.
pub fn sample_magnetization(model: &EnergyModel, a: &VortexConfig, sample: &SampleSpec) -> Result<FieldSamples> {
    let (theta, report) = model.solve_theta(a)?;
    let field = Magnetization::new(*model.domain(), a.clone(), theta)?;
    let mut samples = Vec::new();
    let mut skipped = 0;
    for w in sample.points(model.domain()) {
        match field.direction(w) {
            Ok(m) => samples.push(VectorFieldSample {
                x: w.re,
                y: w.im,
                mx: m.re,
                my: m.im,
            }),
            Err(_) => skipped += 1,
        }
    }
    Ok(FieldSamples {
        samples,
        skipped,
        report,
    })
}
