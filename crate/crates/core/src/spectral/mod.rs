//! Periodic-box Fourier representation of vector fields and the exact
//! spectral operators the rest of the crate builds on.

pub mod field;
pub mod grid;
pub mod ops;
pub mod snapshot;
pub mod transform;

pub use field::{PhysicalField, SolenoidalState, SpectralField, SpectralScalar};
pub use grid::GridSpec;
pub use ops::{curl, dealias, divergence, gradient, lambda_pow, laplacian, leray_project, partial};
