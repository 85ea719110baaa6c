//! Dirichlet Poisson solver on the unit disk.
//!
//! Cell-centered polar grid `r_i = (i + ½)Δr`, `t_k = kΔt`. The discrete
//! operator is the conservative five-point polar Laplacian
//!
//! ```text
//! (L u)_{i,k} = -[r_{i+½}(u_{i+1,k} - u_{i,k}) - r_{i-½}(u_{i,k} - u_{i-1,k})] / (r_i Δr²)
//!               - (u_{i,k+1} - 2u_{i,k} + u_{i,k-1}) / (r_i² Δt²)
//! ```
//!
//! with `r_{-½} = 0` at the pole and the ghost value `u_{n_r} = -u_{n_r-1}`
//! (zero at `r = 1`). A DFT in `k` diagonalizes the angular part; each mode is a
//! real tridiagonal system in `r`.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::ComplexPoint;

pub const DEFAULT_RADIAL_CELLS: usize = 128;
pub const DEFAULT_ANGULAR_CELLS: usize = 256;

/// Polar grid over the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    n_r: usize,
    n_t: usize,
}

impl GridSpec {
    pub fn new(n_r: usize, n_t: usize) -> Result<Self> {
        if n_r < 4 {
            return Err(Error::InvalidGrid(format!("n_r must be at least 4, got {n_r}")));
        }
        if n_t < 8 || !n_t.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_t must be even and at least 8, got {n_t}"
            )));
        }
        Ok(Self { n_r, n_t })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_t
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        1.0 / self.n_r as f64
    }

    pub fn dt(&self) -> f64 {
        TAU / self.n_t as f64
    }

    #[inline]
    pub fn radius(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }

    #[inline]
    pub fn angle(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    #[inline]
    pub fn index(&self, i: usize, k: usize) -> usize {
        i * self.n_t + k
    }

    /// Cartesian node position.
    #[inline]
    pub fn point(&self, i: usize, k: usize) -> ComplexPoint {
        Complex64::from_polar(self.radius(i), self.angle(k))
    }

    /// Quadrature weight `r_i Δr Δt` of the node.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.radius(i) * self.dr() * self.dt()
    }

    /// Doubles both resolutions.
    pub fn refined(&self) -> Self {
        Self {
            n_r: 2 * self.n_r,
            n_t: 2 * self.n_t,
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_r: DEFAULT_RADIAL_CELLS,
            n_t: DEFAULT_ANGULAR_CELLS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// Zero value on the unit circle.
    DirichletZero,
}

/// Samples on the nodes of a [`GridSpec`], row-major in `(i, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField {
    grid: GridSpec,
    values: Vec<f64>,
    boundary: BoundaryCondition,
}

impl PolarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            boundary: BoundaryCondition::DirichletZero,
        }
    }

    /// Samples `f(r, t)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_r() {
            let r = grid.radius(i);
            for k in 0..grid.n_t() {
                values.push(f(r, grid.angle(k)));
            }
        }
        Self {
            grid,
            values,
            boundary: BoundaryCondition::DirichletZero,
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            boundary: BoundaryCondition::DirichletZero,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.boundary
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[self.grid.index(i, k)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |self - other|`; grids must agree.
    pub fn max_abs_diff(&self, other: &PolarField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    fn check_same_grid(&self, other: &PolarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        Ok(())
    }
}

/// Reusable Poisson solver for one grid (FFT plans and factored radial systems).
pub struct DiskPoisson {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // Thomas factorization per angular mode: modified upper diagonal and pivots.
    upper: Vec<f64>,
    lower: Vec<f64>,
    factors: Vec<(Vec<f64>, Vec<f64>)>,
}

impl std::fmt::Debug for DiskPoisson {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiskPoisson").field("grid", &self.grid).finish()
    }
}

/// Eigenvalue of the periodic second difference for mode `k`.
fn angular_eigenvalue(grid: &GridSpec, k: usize) -> f64 {
    let dt = grid.dt();
    let s = (0.5 * k as f64 * dt).sin();
    4.0 * s * s / (dt * dt)
}

impl DiskPoisson {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n_t());
        let inverse = planner.plan_fft_inverse(grid.n_t());
        let n = grid.n_r();
        let dr2 = grid.dr() * grid.dr();

        let mut upper = vec![0.0; n];
        let mut lower = vec![0.0; n];
        let mut radial_diag = vec![0.0; n];
        for i in 0..n {
            let r = grid.radius(i);
            let inner = i as f64 * grid.dr();
            let outer = (i + 1) as f64 * grid.dr();
            lower[i] = -inner / (r * dr2);
            if i + 1 < n {
                upper[i] = -outer / (r * dr2);
                radial_diag[i] = (inner + outer) / (r * dr2);
            } else {
                // ghost value u_n = -u_{n-1}
                radial_diag[i] = (inner + 2.0 * outer) / (r * dr2);
            }
        }

        let factors = (0..grid.n_t())
            .map(|k| {
                let lambda = angular_eigenvalue(&grid, k);
                let mut c = vec![0.0; n];
                let mut pivot = vec![0.0; n];
                for i in 0..n {
                    let r = grid.radius(i);
                    let diag = radial_diag[i] + lambda / (r * r);
                    let p = if i == 0 { diag } else { diag - lower[i] * c[i - 1] };
                    pivot[i] = p;
                    c[i] = upper[i] / p;
                }
                (c, pivot)
            })
            .collect();

        Self {
            grid,
            forward,
            inverse,
            upper,
            lower,
            factors,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Solve `L u = f` with zero boundary values.
    pub fn solve(&self, f: &PolarField) -> Result<PolarField> {
        if f.grid != self.grid {
            return Err(Error::InvalidGrid("right-hand side grid does not match solver".into()));
        }
        if !f.is_finite() {
            return Err(Error::NonFinite("Poisson right-hand side"));
        }
        let (n_r, n_t) = (self.grid.n_r(), self.grid.n_t());

        // spectra[i][k]
        let mut spectra: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for ring in spectra.chunks_mut(n_t) {
            self.forward.process(ring);
        }

        // Transpose to modes[k][i], solve each radial system.
        let mut modes = vec![Complex64::new(0.0, 0.0); n_r * n_t];
        for i in 0..n_r {
            for k in 0..n_t {
                modes[k * n_r + i] = spectra[i * n_t + k];
            }
        }
        modes
            .par_chunks_mut(n_r)
            .zip(self.factors.par_iter())
            .for_each(|(rhs, (c, pivot))| {
                rhs[0] /= pivot[0];
                for i in 1..n_r {
                    rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / pivot[i];
                }
                for i in (0..n_r - 1).rev() {
                    let next = rhs[i + 1];
                    rhs[i] -= c[i] * next;
                }
            });
        debug_assert!(self.upper[n_r - 1] == 0.0);

        for i in 0..n_r {
            for k in 0..n_t {
                spectra[i * n_t + k] = modes[k * n_r + i];
            }
        }
        let scale = 1.0 / n_t as f64;
        for ring in spectra.chunks_mut(n_t) {
            self.inverse.process(ring);
        }
        let values = spectra.iter().map(|z| z.re * scale).collect();
        Ok(PolarField {
            grid: self.grid,
            values,
            boundary: BoundaryCondition::DirichletZero,
        })
    }
}

/// One-shot solve of `-Δu = f`, `u = 0` on the unit circle.
pub fn solve_dirichlet(f: &PolarField) -> Result<PolarField> {
    DiskPoisson::new(f.grid()).solve(f)
}

/// The discrete operator `L u ≈ -Δu` evaluated in physical space.
pub fn apply_negative_laplacian(u: &PolarField) -> PolarField {
    let grid = u.grid;
    let (n_r, n_t) = (grid.n_r(), grid.n_t());
    let dr = grid.dr();
    let dr2 = dr * dr;
    let dt2 = grid.dt() * grid.dt();
    let mut out = vec![0.0; grid.len()];
    for i in 0..n_r {
        let r = grid.radius(i);
        let inner = i as f64 * dr;
        let outer = (i + 1) as f64 * dr;
        for k in 0..n_t {
            let c = u.get(i, k);
            let up = if i + 1 < n_r { u.get(i + 1, k) } else { -c };
            let down = if i > 0 { u.get(i - 1, k) } else { c };
            let radial = -(outer * (up - c) - inner * (c - down)) / (r * dr2);
            let kp = if k + 1 == n_t { 0 } else { k + 1 };
            let km = if k == 0 { n_t - 1 } else { k - 1 };
            let angular = -(u.get(i, kp) - 2.0 * c + u.get(i, km)) / (r * r * dt2);
            out[grid.index(i, k)] = radial + angular;
        }
    }
    PolarField {
        grid,
        values: out,
        boundary: u.boundary,
    }
}

/// `Σ g(r_i, t_k) r_i Δr Δt`: midpoint in `r`, periodic trapezoid in `t`.
pub fn integrate_disk(g: &PolarField) -> f64 {
    let grid = g.grid;
    let rows: Vec<f64> = g
        .values
        .chunks(grid.n_t())
        .enumerate()
        .map(|(i, ring)| grid.weight(i) * ring.iter().sum::<f64>())
        .collect();
    rows.iter().sum()
}

/// `∫ a·b` with the grid quadrature.
pub fn inner_product(a: &PolarField, b: &PolarField) -> Result<f64> {
    a.check_same_grid(b)?;
    let grid = a.grid;
    let rows: Vec<f64> = a
        .values
        .chunks(grid.n_t())
        .zip(b.values.chunks(grid.n_t()))
        .enumerate()
        .map(|(i, (ra, rb))| grid.weight(i) * ra.iter().zip(rb).map(|(x, y)| x * y).sum::<f64>())
        .collect();
    Ok(rows.iter().sum())
}

/// Discrete Dirichlet energy `½ ∫ |∇u|²`.
///
/// Radial differences live on cell faces, with the half-cell difference to the
/// zero boundary value at `r = 1`; angular differences live between neighboring
/// nodes of a ring. Its gradient with respect to the node values is exactly
/// `r_i Δr Δt (L u)_{i,k}`.
pub fn gradient_energy(u: &PolarField) -> f64 {
    let grid = u.grid;
    let (n_r, n_t) = (grid.n_r(), grid.n_t());
    let dr = grid.dr();
    let dt = grid.dt();
    let mut rows = Vec::with_capacity(n_r);
    for i in 0..n_r {
        let r = grid.radius(i);
        let outer = (i + 1) as f64 * dr;
        let mut radial = 0.0;
        let mut angular = 0.0;
        for k in 0..n_t {
            let c = u.get(i, k);
            if i + 1 < n_r {
                let d = u.get(i + 1, k) - c;
                radial += outer * d * d / dr;
            } else {
                radial += 2.0 * outer * c * c / dr;
            }
            let kp = if k + 1 == n_t { 0 } else { k + 1 };
            let d = u.get(i, kp) - c;
            angular += dr * d * d / (r * dt);
        }
        rows.push(0.5 * (radial * dt + angular));
    }
    rows.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn manufactured_error(grid: GridSpec, f: impl Fn(f64, f64) -> f64, u: impl Fn(f64, f64) -> f64) -> f64 {
        let rhs = PolarField::from_fn(grid, f);
        let exact = PolarField::from_fn(grid, u);
        solve_dirichlet(&rhs).unwrap().max_abs_diff(&exact)
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(3, 16).is_err());
        assert!(GridSpec::new(8, 9).is_err());
        assert!(GridSpec::new(8, 6).is_err());
        let g = GridSpec::new(4, 8).unwrap();
        assert_eq!(g.radius(0), 0.125);
        assert_eq!(GridSpec::default().n_r(), 128);
        assert_eq!(GridSpec::default().n_t(), 256);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let grid = GridSpec::new(16, 32).unwrap();
        let u = solve_dirichlet(&PolarField::zeros(grid)).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_non_finite_rhs() {
        let grid = GridSpec::new(8, 16).unwrap();
        let mut f = PolarField::zeros(grid);
        f.values_mut()[3] = f64::NAN;
        assert!(matches!(solve_dirichlet(&f), Err(Error::NonFinite(_))));
    }

    #[test]
    fn solution_satisfies_discrete_equation() {
        let grid = GridSpec::new(24, 48).unwrap();
        let f = PolarField::from_fn(grid, |r, t| (3.0 * t).sin() * r + (r * 7.0).cos());
        let u = solve_dirichlet(&f).unwrap();
        let lu = apply_negative_laplacian(&u);
        assert!(lu.max_abs_diff(&f) < 1e-9 * f.max_abs().max(1.0) * 1e3);
    }

    #[test]
    fn manufactured_quadratic_converges_second_order() {
        let mut errors = Vec::new();
        let mut grid = GridSpec::new(16, 32).unwrap();
        for _ in 0..3 {
            errors.push(manufactured_error(grid, |_, _| 4.0, |r, _| 1.0 - r * r));
            grid = grid.refined();
        }
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.9, "errors {errors:?}");
        }
    }

    #[test]
    fn manufactured_dipole_converges_second_order() {
        let mut errors = Vec::new();
        let mut grid = GridSpec::new(16, 32).unwrap();
        for _ in 0..3 {
            errors.push(manufactured_error(
                grid,
                |r, t| 8.0 * r * t.cos(),
                |r, t| (r - r * r * r) * t.cos(),
            ));
            grid = grid.refined();
        }
        for w in errors.windows(2) {
            assert!((w[0] / w[1]).log2() >= 1.9, "errors {errors:?}");
        }
    }

    #[test]
    fn integrate_disk_examples() {
        let grid = GridSpec::new(64, 64).unwrap();
        let area = integrate_disk(&PolarField::from_fn(grid, |_, _| 1.0));
        assert!((area - PI).abs() < 1e-10);
        let coarse = GridSpec::new(32, 32).unwrap();
        let e_fine = (integrate_disk(&PolarField::from_fn(grid, |r, _| r * r)) - PI / 2.0).abs();
        let e_coarse = (integrate_disk(&PolarField::from_fn(coarse, |r, _| r * r)) - PI / 2.0).abs();
        assert!(e_fine < 1e-3 && (e_coarse / e_fine - 4.0).abs() < 0.2);
        let g = integrate_disk(&PolarField::from_fn(grid, |r, _| 4.0 * r * r));
        assert!((g - TAU).abs() < 5e-3);
    }

    #[test]
    fn gradient_energy_examples() {
        let grid = GridSpec::new(16, 32).unwrap();
        assert_eq!(gradient_energy(&PolarField::zeros(grid)), 0.0);
        // radial quadratic: the face sum is exact up to π Δr³ / 8, so at least second order
        let mut errs = Vec::new();
        let mut g = grid;
        for _ in 0..3 {
            let u = PolarField::from_fn(g, |r, _| 1.0 - r * r);
            errs.push((gradient_energy(&u) - PI).abs());
            g = g.refined();
        }
        assert!(errs[2] < 1e-3);
        for w in errs.windows(2) {
            assert!(w[0] / w[1] >= 3.5, "{errs:?}");
        }
        // (r - r³) cos t has energy π/3 and converges at exactly second order
        let mut errs = Vec::new();
        let mut g = grid;
        for _ in 0..3 {
            let u = PolarField::from_fn(g, |r, t| (r - r * r * r) * t.cos());
            errs.push((gradient_energy(&u) - PI / 3.0).abs());
            g = g.refined();
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "{errs:?}");
        }
    }

    #[test]
    fn energy_gradient_is_weighted_operator() {
        let grid = GridSpec::new(6, 8).unwrap();
        let u = PolarField::from_fn(grid, |r, t| (1.0 - r) * (t.sin() + 0.3 * r));
        let lu = apply_negative_laplacian(&u);
        let h = 1e-6;
        for idx in [0, 5, 17, 40, 47] {
            let mut up = u.clone();
            up.values_mut()[idx] += h;
            let mut um = u.clone();
            um.values_mut()[idx] -= h;
            let fd = (gradient_energy(&up) - gradient_energy(&um)) / (2.0 * h);
            let i = idx / grid.n_t();
            let exact = grid.weight(i) * lu.values()[idx];
            assert!(
                (fd - exact).abs() < 1e-7 * exact.abs().max(1.0),
                "{idx}: {fd} vs {exact}"
            );
        }
    }

    #[test]
    fn pole_regularity() {
        let grid = GridSpec::new(32, 64).unwrap();
        let f = PolarField::from_fn(grid, |r, t| 1.0 + r * t.cos() + (2.0 * t).sin());
        let u = solve_dirichlet(&f).unwrap();
        let inner = (0..grid.n_t()).fold(0.0f64, |m, k| m.max(u.get(0, k).abs()));
        assert!(u.is_finite());
        assert!(inner <= u.max_abs());
    }
}
