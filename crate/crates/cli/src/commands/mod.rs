pub mod field;
pub mod landscape;
pub mod minimize;
pub mod verify;

use num_complex::Complex64;
use serde_json::{json, Value};
use vortexfield_core::{ConformalDomain, VortexConfig};

use crate::output::num;

/// How a command finished, mapped to the process exit code by `main`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    BudgetExhausted,
    ChecksFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::BudgetExhausted => 2,
            Outcome::ChecksFailed => 3,
        }
    }
}

/// Cartesian positions `Φ(e^{is_j})` on the physical boundary.
pub fn boundary_positions(domain: &ConformalDomain, config: &VortexConfig) -> Vec<Complex64> {
    config.angles().iter().map(|&s| domain.boundary_point(s)).collect()
}

pub fn positions_json(points: &[Complex64]) -> Value {
    Value::Array(points.iter().map(|p| json!([num(p.re), num(p.im)])).collect())
}
