//! Nonlinear work in `Hᵐ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rhs::{rhs, RhsOptions};
use crate::spectral::field::mode_norm;
use crate::spectral::{SolenoidalState, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HmEnergyReport {
    /// `½ d/dt(‖u‖²_{Hᵐ} + ‖B‖²_{Hᵐ}) + ‖∇u‖²_{Hᵐ} + ‖∇B‖²_{Hᵐ}`.
    pub lhs: f64,
    /// `(‖u‖²_{Hᵐ} + ‖B‖²_{Hᵐ})(‖∇u‖_{Hᵐ} + ‖∇B‖_{Hᵐ})`.
    pub rhs_core: f64,
    /// `lhs / rhs_core`, zero when `rhs_core` vanishes.
    pub implied_constant: f64,
}

/// Largest share of the `Hᵐ` norm allowed in the outermost retained layer.
pub const HM_RESOLUTION_TOLERANCE: f64 = 1e-6;

fn hm_weight(k2: f64, m: u32) -> f64 {
    (1.0 + k2).powi(m as i32)
}

fn hm_norm_sq(f: &SpectralField, m: u32, extra_k2: bool) -> f64 {
    let grid = *f.grid();
    f.weighted_norm_sq(|idx| {
        let k2 = grid.k2(idx);
        hm_weight(k2, m) * if extra_k2 { k2 } else { 1.0 }
    })
}

fn top_layer_share(state: &SolenoidalState, m: u32) -> f64 {
    let grid = *state.grid();
    let cut = grid.dealias_cutoff();
    let (mut top, mut all) = (0.0, 0.0);
    for idx in 0..grid.len() {
        let w = hm_weight(grid.k2(idx), m);
        let e = w * (mode_norm(&state.u.at(idx)).powi(2) + mode_norm(&state.b.at(idx)).powi(2));
        all += e;
        if grid.modes(idx).iter().map(|x| x.abs()).max() == Some(cut) {
            top += e;
        }
    }
    if all > 0.0 {
        top / all
    } else {
        0.0
    }
}

/// Evaluates the `Hᵐ` energy balance at a state.
///
/// Since `½ d/dt ‖U‖²_{Hᵐ} = ⟨ΔU + N(U), U⟩_{Hᵐ}` and `⟨ΔU, U⟩_{Hᵐ} = −‖∇U‖²_{Hᵐ}`,
/// `lhs` is the nonlinear work `⟨N(U), U⟩_{Hᵐ}`, computed from the nonlinear
/// part of [`rhs`]. With `nonlinear == false` it is exactly zero.
pub fn hm_energy_report(state: &SolenoidalState, m: u32, nonlinear: bool) -> Result<HmEnergyReport> {
    let share = top_layer_share(state, m);
    if share > HM_RESOLUTION_TOLERANCE {
        return Err(Error::Unresolved { fraction: share });
    }
    let grid = *state.grid();
    let opts = RhsOptions {
        laplacian: false,
        nonlinear,
    };
    let (du, db) = rhs(state, opts)?;
    let w = |idx: usize| hm_weight(grid.k2(idx), m);
    let lhs = du.weighted_inner(&state.u, w)? + db.weighted_inner(&state.b, w)?;
    let norm = hm_norm_sq(&state.u, m, false) + hm_norm_sq(&state.b, m, false);
    let grad = hm_norm_sq(&state.u, m, true).sqrt() + hm_norm_sq(&state.b, m, true).sqrt();
    let rhs_core = norm * grad;
    Ok(HmEnergyReport {
        lhs,
        rhs_core,
        implied_constant: if rhs_core > 0.0 { lhs / rhs_core } else { 0.0 },
    })
}
