//! Pseudospectral solver and decay diagnostics for viscous resistive
//! Hall-MHD on a periodic box.

pub mod decay;
pub mod error;
pub mod gevrey;
pub mod harness;
pub mod heat;
pub mod rhs;
pub mod spectral;
pub mod stepper;

pub use error::{Error, Result};
pub use spectral::{GridSpec, PhysicalField, SolenoidalState, SpectralField, SpectralScalar};
