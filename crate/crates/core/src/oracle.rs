//! Independent minimizer of the discrete `G` functional.
//!
//! Plain gradient descent over the interior node values (the Dirichlet data
//! are built into the discrete energy, so no projection step is needed), with
//! Barzilai–Borwein trial steps and Armijo backtracking. It never calls the
//! Poisson solver, which makes it a genuine cross-check of the Picard iteration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::{CanonicalMap, VortexConfig};
use crate::error::{Error, Result};
use crate::micromag::{euler_lagrange_residual, picard_rhs, ExternalField};
use crate::poisson::{apply_negative_laplacian, GridSpec, PolarField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentOptions {
    /// Stop once `‖L θ - f(θ)‖_∞` (the gradient in the quadrature-weighted metric) is below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentReport {
    pub iterations: usize,
    pub backtracks: usize,
    pub residual: f64,
    pub converged: bool,
}

fn weighted_dot(grid: &GridSpec, a: &[f64], b: &[f64]) -> f64 {
    a.chunks(grid.n_t())
        .zip(b.chunks(grid.n_t()))
        .enumerate()
        .map(|(i, (x, y))| grid.weight(i) * x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .sum()
}

/// Change of `-Σ w h·(e^{iθ} M)` when `θ` moves by `δ`, summed term by term.
fn coupling_change(grid: &GridSpec, theta: &[f64], delta: &[f64], m: &[Complex64], h: Complex64) -> f64 {
    let n_t = grid.n_t();
    let mut total = 0.0;
    for (idx, ((&th, &d), &mm)) in theta.iter().zip(delta).zip(m).enumerate() {
        let v = Complex64::from_polar(1.0, th) * mm;
        let half = 0.5 * d;
        let rot = Complex64::new(-2.0 * half.sin() * half.sin(), d.sin());
        let dv = v * rot;
        total -= grid.weight(idx / n_t) * (h.re * dv.re + h.im * dv.im);
    }
    total
}

/// Minimize the discrete `G` for the configuration `a`.
pub fn descent_minimize(
    a: &VortexConfig,
    h: &ExternalField,
    grid: GridSpec,
    opts: &DescentOptions,
) -> Result<(PolarField, DescentReport)> {
    let m = CanonicalMap::new(a)?.sample_on_grid(&grid);
    descent_minimize_sampled(&m, h, grid, opts)
}

pub fn descent_minimize_sampled(
    m: &[Complex64],
    h: &ExternalField,
    grid: GridSpec,
    opts: &DescentOptions,
) -> Result<(PolarField, DescentReport)> {
    if m.len() != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "{} samples for {} nodes",
            m.len(),
            grid.len()
        )));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter("descent tolerance must be positive".into()));
    }
    let hv = h.vector();
    let gradient = |theta: &PolarField| -> (PolarField, Vec<f64>) {
        let lx = apply_negative_laplacian(theta);
        let f = picard_rhs(theta, m, h);
        let r = lx.values().iter().zip(f.values()).map(|(a, b)| a - b).collect();
        (lx, r)
    };

    let mut theta = PolarField::zeros(grid);
    let (mut lx, mut r) = gradient(&theta);
    // first trial step from the largest stencil coefficient
    let mut alpha = 0.5 * grid.dr().powi(2).min((grid.radius(0) * grid.dt()).powi(2));
    let mut report = DescentReport {
        iterations: 0,
        backtracks: 0,
        residual: f64::INFINITY,
        converged: false,
    };
    for it in 0..opts.max_iter {
        let res = r.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        report.iterations = it;
        report.residual = res;
        if res < opts.tol {
            report.converged = true;
            break;
        }
        let d: Vec<f64> = r.iter().map(|v| -v).collect();
        let ld = apply_negative_laplacian(&PolarField::from_values(grid, d.clone())?);
        let slope = weighted_dot(&grid, lx.values(), &d);
        let curvature = weighted_dot(&grid, ld.values(), &d);
        let rr = weighted_dot(&grid, &r, &r);
        let mut accepted = None;
        for _ in 0..60 {
            let delta: Vec<f64> = d.iter().map(|v| alpha * v).collect();
            let change =
                alpha * slope + 0.5 * alpha * alpha * curvature + coupling_change(&grid, theta.values(), &delta, m, hv);
            if change <= -1e-4 * alpha * rr {
                accepted = Some(delta);
                break;
            }
            alpha *= 0.5;
            report.backtracks += 1;
        }
        let Some(delta) = accepted else {
            // no decrease measurable at this precision
            break;
        };
        let next: Vec<f64> = theta.values().iter().zip(&delta).map(|(a, b)| a + b).collect();
        theta = PolarField::from_values(grid, next)?;
        let (lx_next, r_next) = gradient(&theta);
        let y: Vec<f64> = r_next.iter().zip(&r).map(|(a, b)| a - b).collect();
        let sy = weighted_dot(&grid, &delta, &y);
        let ss = weighted_dot(&grid, &delta, &delta);
        alpha = if sy > 0.0 { ss / sy } else { 2.0 * alpha };
        lx = lx_next;
        r = r_next;
    }
    report.residual = euler_lagrange_residual(&theta, m, h);
    report.converged = report.residual < opts.tol;
    Ok((theta, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::micromag::picard_solve;
    use std::f64::consts::PI;

    #[test]
    fn zero_field_is_immediate() {
        let grid = GridSpec::new(8, 16).unwrap();
        let a = VortexConfig::pair(0.0, PI).unwrap();
        let (theta, report) = descent_minimize(&a, &ExternalField::zero(), grid, &DescentOptions::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 0);
        assert_eq!(theta.max_abs(), 0.0);
    }

    #[test]
    fn agrees_with_picard() {
        let grid = GridSpec::new(16, 32).unwrap();
        let a = VortexConfig::pair(0.0, PI).unwrap();
        let h = ExternalField::new(0.0, 0.01).unwrap();
        let (descent, report) = descent_minimize(&a, &h, grid, &DescentOptions::default()).unwrap();
        assert!(report.converged, "{report:?}");
        let (picard, _) = picard_solve(&a, &h, grid, 1e-12, 50).unwrap();
        assert!(descent.max_abs_diff(&picard) < 1e-8);
    }
}
