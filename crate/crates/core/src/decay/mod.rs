//! Decay rates of the energy, its derivatives and the difference from the
//! heat flow, with the auxiliary quantities of the Fourier splitting
//! argument.

pub mod energy;
pub mod exponents;
pub mod fit;
pub mod init;
pub mod integrals;
pub mod moments;
pub mod series;

pub use energy::{hm_energy_report, HmEnergyReport};
pub use exponents::{bootstrap_exponent, diff_decay_exponent, Bootstrap};
pub use fit::{fit_exponent, quantile_fit, two_sided_fit, DecayFit, TwoSidedFit};
pub use init::{make_initial_data, random_field};
pub use integrals::{ball_integral, phi_integral, PhiGrowth, PhiReport};
pub use moments::{m0_membership, moment_matrices, weighted_moment, M0Membership, MomentMatrices};
pub use series::{derivative_series, energy_series, Series};
