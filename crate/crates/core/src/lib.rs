//! Boundary vortices in thin-film micromagnetics: renormalized energies,
//! external-field corrections and vortex-angle minimization on the unit disk
//! and its conformal images.

pub mod canonical;
pub mod error;
pub mod geom;
pub mod micromag;
pub mod optimize;
pub mod oracle;
pub mod poisson;
pub mod quadrature;
pub mod renorm;

pub use canonical::{CanonicalField, CanonicalMap, UnitVectorField, VortexConfig};
pub use error::{Error, Result};
pub use geom::{ComplexPoint, ConformalDomain, DomainKind};
pub use micromag::{EnergyModel, ExternalField, FixedPointReport, PicardOptions, SampleSpec, VectorFieldSample};
pub use optimize::{AnglePair, LandscapeGrid, NelderMeadOptions, NelderMeadResult, SimplexState};
pub use poisson::{GridSpec, PolarField};
pub use renorm::{EnergyBreakdown, EnergyDiagnostics};
