use thiserror::Error;

/// Errors raised by the geometry, solver and optimization layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A point handed to the forward map lies outside the closed unit disk.
    #[error("point with modulus {modulus} lies outside the closed unit disk")]
    DomainViolation { modulus: f64 },

    /// A point handed to the inverse map does not belong to the image domain.
    #[error("point ({re}, {im}) lies outside the conformal image of the disk")]
    OutsideDomain { re: f64, im: f64 },

    /// The boundary parametrization has (numerically) zero speed.
    #[error("degenerate conformal map: boundary speed {speed:e} at t = {t}")]
    DegenerateMap { t: f64, speed: f64 },

    #[error("unsupported vortex configuration: {0}")]
    UnsupportedConfiguration(String),

    /// Evaluation point too close to a vortex.
    #[error("evaluation point within {distance:e} of a vortex")]
    Singularity { distance: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The fixed-point iteration did not reach its tolerance.
    #[error("fixed-point iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    NotConverged { iterations: usize, last_change: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
