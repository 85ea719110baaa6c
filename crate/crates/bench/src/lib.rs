//! Fixed inputs shared by the benchmarks.

use std::f64::consts::PI;

use vortexfield_core::{ConformalDomain, EnergyModel, ExternalField, GridSpec, PolarField, VortexConfig};

pub fn opposite_pair() -> VortexConfig {
    VortexConfig::pair(0.0, PI).expect("distinct angles")
}

pub fn weak_field() -> ExternalField {
    ExternalField::new(-0.01, 0.0).expect("inside the default bound")
}

/// Right-hand side with a known smooth solution, for timing the Poisson solve.
pub fn dipole_source(grid: GridSpec) -> PolarField {
    PolarField::from_fn(grid, |r, t| 8.0 * r * t.cos())
}

pub fn oval_model(grid: GridSpec) -> EnergyModel {
    EnergyModel::new(ConformalDomain::oval(), weak_field(), grid).expect("valid model")
}
