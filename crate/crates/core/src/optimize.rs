//! Minimization over vortex angles `(s₁, s₂) ∈ [0, 2π)²`.
//!
//! Nelder–Mead works on the torus: before every move the simplex is unwrapped
//! around its best vertex, and stored angles are wrapped back to `[0, 2π)`.
//! `+∞` (and NaN) objective values always rank worst.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{angle_difference, wrap_angle};
use crate::micromag::EnergyModel;

pub type AnglePair = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    /// Edge length of the initial right-angled simplex, in radians.
    pub simplex_size: f64,
    /// Torus diameter of the simplex at convergence.
    pub x_tol: f64,
    /// Spread of vertex values at convergence.
    pub f_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            simplex_size: 0.25,
            x_tol: 1e-6,
            f_tol: 1e-6,
            max_evals: 500,
        }
    }
}

impl NelderMeadOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.simplex_size > 0.0
            && self.simplex_size < TAU
            && self.x_tol > 0.0
            && self.f_tol > 0.0
            && self.max_evals >= 3;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid simplex options {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationCounts {
    pub reflect: usize,
    pub expand: usize,
    pub contract: usize,
    pub shrink: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexState {
    /// Sorted by value, best first; angles in `[0, 2π)`.
    pub vertices: [AnglePair; 3],
    pub values: [f64; 3],
    pub operations: OperationCounts,
    /// Best value at the start of every iteration.
    pub best_history: Vec<f64>,
    pub evaluations: usize,
    pub iterations: usize,
}

impl SimplexState {
    /// Largest torus distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                d = d.max(torus_distance(self.vertices[i], self.vertices[j]));
            }
        }
        d
    }

    pub fn value_spread(&self) -> f64 {
        self.values[2] - self.values[0]
    }

    fn sort(&mut self) {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| rank(self.values[i], self.values[j]));
        self.vertices = idx.map(|i| self.vertices[i]);
        self.values = idx.map(|i| self.values[i]);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadResult {
    pub s_min: AnglePair,
    pub value: f64,
    /// `false` when the evaluation budget ran out first.
    pub converged: bool,
    pub state: SimplexState,
}

/// Total order with NaN treated as `+∞`.
fn rank(a: f64, b: f64) -> Ordering {
    let key = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    key(a).total_cmp(&key(b))
}

fn better(a: f64, b: f64) -> bool {
    rank(a, b) == Ordering::Less
}

/// Max of the componentwise circular distances.
pub fn torus_distance(a: AnglePair, b: AnglePair) -> f64 {
    angle_difference(a[0], b[0])
        .abs()
        .max(angle_difference(a[1], b[1]).abs())
}

fn wrap_pair(p: AnglePair) -> AnglePair {
    [wrap_angle(p[0]), wrap_angle(p[1])]
}

fn lerp(from: AnglePair, to: AnglePair, t: f64) -> AnglePair {
    [from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])]
}

struct Budget<'a, F> {
    objective: &'a F,
    used: usize,
    max: usize,
}

impl<F: Fn(AnglePair) -> f64> Budget<'_, F> {
    fn eval(&mut self, p: AnglePair) -> Option<f64> {
        if self.used >= self.max {
            return None;
        }
        self.used += 1;
        let v = (self.objective)(wrap_pair(p));
        Some(if v.is_nan() { f64::INFINITY } else { v })
    }
}

/// Nelder–Mead with reflect 1, expand 2, contract ½, shrink ½.
pub fn nelder_mead<F>(objective: F, s0: AnglePair, opts: &NelderMeadOptions) -> Result<NelderMeadResult>
where
    F: Fn(AnglePair) -> f64,
{
    opts.validate()?;
    if !(s0[0].is_finite() && s0[1].is_finite()) {
        return Err(Error::NonFinite("initial angles"));
    }
    let mut budget = Budget {
        objective: &objective,
        used: 0,
        max: opts.max_evals,
    };
    let start = wrap_pair(s0);
    let vertices = [
        start,
        wrap_pair([start[0] + opts.simplex_size, start[1]]),
        wrap_pair([start[0], start[1] + opts.simplex_size]),
    ];
    let mut values = [0.0; 3];
    for (v, p) in values.iter_mut().zip(&vertices) {
        *v = budget.eval(*p).expect("budget covers the initial simplex");
    }
    let mut state = SimplexState {
        vertices,
        values,
        operations: OperationCounts::default(),
        best_history: Vec::new(),
        evaluations: 3,
        iterations: 0,
    };

    let mut converged = false;
    loop {
        state.sort();
        state.best_history.push(state.values[0]);
        if state.diameter() <= opts.x_tol && state.value_spread() <= opts.f_tol {
            converged = true;
            break;
        }
        state.iterations += 1;
        if step(&mut state, &mut budget).is_none() {
            break;
        }
        state.evaluations = budget.used;
    }
    state.evaluations = budget.used;
    state.sort();
    Ok(NelderMeadResult {
        s_min: state.vertices[0],
        value: state.values[0],
        converged,
        state,
    })
}

/// One simplex move; `None` when the budget runs out mid-move.
fn step<F: Fn(AnglePair) -> f64>(state: &mut SimplexState, budget: &mut Budget<'_, F>) -> Option<()> {
    let best = state.vertices[0];
    // unwrap around the best vertex so the move is a plain Euclidean one
    let unwrap = |p: AnglePair| {
        [
            best[0] + angle_difference(p[0], best[0]),
            best[1] + angle_difference(p[1], best[1]),
        ]
    };
    let v1 = unwrap(state.vertices[1]);
    let worst = unwrap(state.vertices[2]);
    let [f0, f1, f2] = state.values;
    let centroid = lerp(best, v1, 0.5);

    let reflected = lerp(centroid, worst, -1.0);
    let fr = budget.eval(reflected)?;
    if better(fr, f0) {
        let expanded = lerp(centroid, worst, -2.0);
        let fe = budget.eval(expanded)?;
        if better(fe, fr) {
            state.operations.expand += 1;
            replace_worst(state, expanded, fe);
        } else {
            state.operations.reflect += 1;
            replace_worst(state, reflected, fr);
        }
        return Some(());
    }
    if better(fr, f1) {
        state.operations.reflect += 1;
        replace_worst(state, reflected, fr);
        return Some(());
    }
    if better(fr, f2) {
        let outside = lerp(centroid, reflected, 0.5);
        let fc = budget.eval(outside)?;
        if rank(fc, fr) != Ordering::Greater {
            state.operations.contract += 1;
            replace_worst(state, outside, fc);
            return Some(());
        }
    } else {
        let inside = lerp(centroid, worst, 0.5);
        let fc = budget.eval(inside)?;
        if better(fc, f2) {
            state.operations.contract += 1;
            replace_worst(state, inside, fc);
            return Some(());
        }
    }

    state.operations.shrink += 1;
    let shrunk = [lerp(best, v1, 0.5), lerp(best, worst, 0.5)];
    for (k, p) in shrunk.into_iter().enumerate() {
        let f = budget.eval(p)?;
        state.vertices[k + 1] = wrap_pair(p);
        state.values[k + 1] = f;
    }
    Some(())
}

fn replace_worst(state: &mut SimplexState, p: AnglePair, f: f64) {
    state.vertices[2] = wrap_pair(p);
    state.values[2] = f;
}

/// Energy on an `n × n` grid of angle pairs `s = 2π (i, j) / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeGrid {
    n: usize,
    /// Row-major, `values[i * n + j] = W(s_i, s_j)`.
    values: Vec<f64>,
    failures: usize,
}

impl LandscapeGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn angle(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n as f64
    }

    pub fn cell_width(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Off-diagonal cells whose evaluation failed (stored as `+∞`).
    pub fn failures(&self) -> usize {
        self.failures
    }

    /// Finite minimum, lowest row-major index on ties.
    pub fn argmin(&self) -> Option<(usize, usize)> {
        let mut best: Option<usize> = None;
        for (idx, &v) in self.values.iter().enumerate() {
            if v.is_finite() && best.is_none_or(|b| v < self.values[b]) {
                best = Some(idx);
            }
        }
        best.map(|idx| (idx / self.n, idx % self.n))
    }

    pub fn min_value(&self) -> Option<f64> {
        self.argmin().map(|(i, j)| self.get(i, j))
    }

    /// `max |W(i, j) - W(j, i)|` over finite pairs.
    pub fn exchange_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if a.is_finite() && b.is_finite() {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }
}

/// Evaluate a fallible objective on the `n × n` grid; diagonal cells are `+∞`.
pub fn landscape_with<F>(objective: F, n: usize) -> Result<LandscapeGrid>
where
    F: Fn(AnglePair) -> Result<f64> + Sync,
{
    if n < 16 {
        return Err(Error::InvalidParameter(format!("landscape resolution {n} < 16")));
    }
    let cells: Vec<(f64, bool)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let sep = i.abs_diff(j).min(n - i.abs_diff(j));
            if sep == 0 {
                return (f64::INFINITY, false);
            }
            let s = [TAU * i as f64 / n as f64, TAU * j as f64 / n as f64];
            match objective(s) {
                Ok(v) if !v.is_nan() => (v, false),
                _ => (f64::INFINITY, true),
            }
        })
        .collect();
    Ok(LandscapeGrid {
        n,
        failures: cells.iter().filter(|c| c.1).count(),
        values: cells.into_iter().map(|c| c.0).collect(),
    })
}

/// `W_{Ω;h}` over the grid.
pub fn landscape(model: &EnergyModel, n: usize) -> Result<LandscapeGrid> {
    landscape_with(|s| model.energy_at(s).map(|e| e.total), n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleMinimum {
    pub s_min: AnglePair,
    pub value: f64,
    pub coarse_cell: (usize, usize),
    /// Spacing of the refinement grid.
    pub refined_step: f64,
}

/// Coarse argmin over the landscape, refined by a 10× finer grid spanning one
/// coarse cell on either side.
pub fn grid_oracle_with<F>(objective: F, n: usize) -> Result<OracleMinimum>
where
    F: Fn(AnglePair) -> Result<f64> + Sync,
{
    if n < 32 {
        return Err(Error::InvalidParameter(format!("oracle resolution {n} < 32")));
    }
    let coarse = landscape_with(&objective, n)?;
    let (ci, cj) = coarse
        .argmin()
        .ok_or_else(|| Error::UnsupportedConfiguration("no finite landscape cell".into()))?;
    let step = coarse.cell_width() / 10.0;
    let center = [coarse.angle(ci), coarse.angle(cj)];
    let m = 21;
    let fine: Vec<(AnglePair, f64)> = (0..m * m)
        .into_par_iter()
        .map(|idx| {
            let p = wrap_pair([
                center[0] + step * ((idx / m) as f64 - 10.0),
                center[1] + step * ((idx % m) as f64 - 10.0),
            ]);
            let v = match objective(p) {
                Ok(v) if !v.is_nan() => v,
                _ => f64::INFINITY,
            };
            (p, v)
        })
        .collect();
    let mut best = (center, coarse.get(ci, cj));
    for &(p, v) in &fine {
        if v < best.1 {
            best = (p, v);
        }
    }
    Ok(OracleMinimum {
        s_min: best.0,
        value: best.1,
        coarse_cell: (ci, cj),
        refined_step: step,
    })
}

pub fn grid_oracle(model: &EnergyModel, n: usize) -> Result<OracleMinimum> {
    grid_oracle_with(|s| model.energy_at(s).map(|e| e.total), n)
}
