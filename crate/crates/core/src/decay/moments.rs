//! Time-integrated moment matrices, membership in the class ℳ₀, and the
//! spatially weighted energy `∫|x|(|u|² + |B|²)`.
//!
//! ```text
//! Ã_ij   = ∫₀^∞ ∫ (u_i u_j − B_i B_j) dx dt
//! C̃_ij   = ∫₀^∞ ∫ (u_i B_j − B_i u_j) dx dt
//! ⟨x,B₀⟩_ij = ∫ x_j B_{0i}(x) dx
//! ```
//!
//! A trajectory is in ℳ₀ when `Ã` is a multiple of the identity and
//! `C̃ = ⟨x,B₀⟩`. Positions are measured from the box centre, which is where
//! the initial data is localized.

use serde::Serialize;

use super::fit::DecayFit;
use crate::error::{Error, Result};
use crate::spectral::{SolenoidalState, SpectralField};

pub type Mat3 = [[f64; 3]; 3];

/// Spatial integrands of `Ã` and `C̃` at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentSample {
    pub t: f64,
    pub a: Mat3,
    pub c: Mat3,
}

pub fn moment_sample(state: &SolenoidalState) -> MomentSample {
    let grid = *state.grid();
    let u = state.u.to_physical();
    let b = state.b.to_physical();
    let mut a = [[0.0; 3]; 3];
    let mut c = [[0.0; 3]; 3];
    for idx in 0..grid.len() {
        let uv = u.at(idx);
        let bv = b.at(idx);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += uv[i] * uv[j] - bv[i] * bv[j];
                c[i][j] += uv[i] * bv[j] - bv[i] * uv[j];
            }
        }
    }
    let dv = grid.cell_volume();
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] *= dv;
            c[i][j] *= dv;
        }
    }
    MomentSample { t: state.time, a, c }
}

/// `⟨x, B₀⟩_ij = ∫ x_j B_{0i}(x) dx`, `x` relative to the box centre.
pub fn initial_moment(b0: &SpectralField) -> Mat3 {
    let grid = *b0.grid();
    let b = b0.to_physical();
    let xc = grid.center();
    let mut m = [[0.0; 3]; 3];
    for idx in 0..grid.len() {
        let (i, j, l) = grid.unflatten(idx);
        let x = [
            grid.coordinate(i) - xc,
            grid.coordinate(j) - xc,
            grid.coordinate(l) - xc,
        ];
        let v = b.at(idx);
        for r in 0..3 {
            for s in 0..3 {
                m[r][s] += x[s] * v[r];
            }
        }
    }
    let dv = grid.cell_volume();
    m.map(|row| row.map(|x| x * dv))
}

pub fn frobenius(m: &Mat3) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

fn transpose(a: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

/// Largest tail fraction accepted without flagging the horizon.
pub const TAIL_TOLERANCE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentMatrices {
    pub a_tilde: Mat3,
    pub c_tilde: Mat3,
    pub x_b0: Mat3,
    /// Last time of the quadrature.
    pub horizon: f64,
    /// Bound on every entry of the neglected `∫_T^∞`, from the energy fit:
    /// `|integrand| ≤ E(t) ≤ C(t+1)^{−p}`.
    pub tail_bound: f64,
    /// `tail_bound` relative to `max(‖Ã‖_F, ‖C̃‖_F)`.
    pub tail_fraction: f64,
    /// `tail_fraction` exceeds [`TAIL_TOLERANCE`].
    pub tail_flagged: bool,
}

impl MomentMatrices {
    /// `‖Ã − Ãᵀ‖_F / ‖Ã‖_F`.
    pub fn symmetry_defect(&self) -> f64 {
        rel(frobenius(&sub(&self.a_tilde, &transpose(&self.a_tilde))), frobenius(&self.a_tilde))
    }

    /// `‖C̃ + C̃ᵀ‖_F / ‖C̃‖_F`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let s: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| self.c_tilde[i][j] + self.c_tilde[j][i]));
        rel(frobenius(&s), frobenius(&self.c_tilde))
    }
}

fn rel(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Trapezoidal time integrals of the samples, with the horizon tail bounded
/// through `energy_fit`.
///
/// Fails with [`Error::InsufficientDecay`] when the fitted exponent is at
/// most 1, since the tail integral then diverges.
pub fn moment_matrices(samples: &[MomentSample], b0: &SpectralField, energy_fit: &DecayFit) -> Result<MomentMatrices> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            found: samples.len(),
            needed: 2,
        });
    }
    let p = energy_fit.exponent;
    if !(p > 1.0) {
        return Err(Error::InsufficientDecay { exponent: p });
    }
    let mut a = [[0.0; 3]; 3];
    let mut c = [[0.0; 3]; 3];
    for w in samples.windows(2) {
        let h = 0.5 * (w[1].t - w[0].t);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += h * (w[0].a[i][j] + w[1].a[i][j]);
                c[i][j] += h * (w[0].c[i][j] + w[1].c[i][j]);
            }
        }
    }
    let horizon = samples.last().unwrap().t;
    let tail = energy_fit.prefactor * (horizon + 1.0).powf(1.0 - p) / (p - 1.0);
    let scale = frobenius(&a).max(frobenius(&c));
    let frac = if scale > 0.0 { tail / scale } else { 0.0 };
    Ok(MomentMatrices {
        a_tilde: a,
        c_tilde: c,
        x_b0: initial_moment(b0),
        horizon,
        tail_bound: tail,
        tail_fraction: frac,
        tail_flagged: frac > TAIL_TOLERANCE,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct M0Membership {
    pub is_member: bool,
    /// `‖Ã − (tr Ã/3) I‖_F / ‖Ã‖_F`.
    pub scalar_defect: f64,
    /// `‖C̃ − ⟨x,B₀⟩‖_F / max(‖C̃‖_F, ‖⟨x,B₀⟩‖_F)`.
    pub c_defect: f64,
    /// First-order uncertainty of `scalar_defect` from the horizon tail.
    pub scalar_error: f64,
    /// First-order uncertainty of `c_defect` from the horizon tail.
    pub c_error: f64,
}

pub fn m0_membership(mm: &MomentMatrices, tol: f64) -> M0Membership {
    let a = &mm.a_tilde;
    let tr = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let dev: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - if i == j { tr } else { 0.0 }));
    let na = frobenius(a);
    let scalar_defect = rel(frobenius(&dev), na);
    let nc = frobenius(&mm.c_tilde).max(frobenius(&mm.x_b0));
    let c_defect = rel(frobenius(&sub(&mm.c_tilde, &mm.x_b0)), nc);
    // a perturbation of at most `tail_bound` per entry has Frobenius norm ≤ 3·tail_bound
    let dt = 3.0 * mm.tail_bound;
    M0Membership {
        is_member: scalar_defect < tol && c_defect < tol,
        scalar_defect,
        c_defect,
        scalar_error: rel(dt * (1.0 + scalar_defect), na),
        c_error: rel(dt * (1.0 + c_defect), nc),
    }
}

/// Weighted energy and the fraction of energy near the box boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightedMoment {
    /// `∫ |x − x_c| (|u|² + |B|²) dx`.
    pub value: f64,
    /// Share of `E` at points with `max_i |x_i − x_c| > 0.4 L`.
    pub boundary_fraction: f64,
}

/// Largest boundary share for which the weighted moment is a faithful
/// stand-in for the whole-space quantity.
pub const BOUNDARY_TOLERANCE: f64 = 0.05;

pub fn weighted_moment(state: &SolenoidalState) -> WeightedMoment {
    let grid = *state.grid();
    let u = state.u.to_physical();
    let b = state.b.to_physical();
    let xc = grid.center();
    let edge = 0.4 * grid.box_length;
    let (mut w, mut total, mut outer) = (0.0, 0.0, 0.0);
    for idx in 0..grid.len() {
        let (i, j, l) = grid.unflatten(idx);
        let x = [
            grid.coordinate(i) - xc,
            grid.coordinate(j) - xc,
            grid.coordinate(l) - xc,
        ];
        let uv = u.at(idx);
        let bv = b.at(idx);
        let e: f64 = (0..3).map(|a| uv[a] * uv[a] + bv[a] * bv[a]).sum();
        w += (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() * e;
        total += e;
        if x.iter().any(|c| c.abs() > edge) {
            outer += e;
        }
    }
    WeightedMoment {
        value: w * grid.cell_volume(),
        boundary_fraction: if total > 0.0 { outer / total } else { 0.0 },
    }
}

/// Linear-in-time envelope `W(t) ≤ W(0) + s (t+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEnvelope {
    pub base: f64,
    /// Largest observed `|ΔW/Δt|` between consecutive samples.
    pub slope: f64,
    /// Largest `W(t) − W(0) − s(t+1)`; nonpositive when the envelope holds.
    pub max_excess: f64,
}

impl MomentEnvelope {
    pub fn holds(&self) -> bool {
        self.slope > 0.0 && self.slope.is_finite() && self.max_excess <= 0.0
    }
}

/// Fits the envelope slope as the largest rate of change of `w`, the
/// quantity a linear-growth bound controls.
pub fn moment_envelope(t: &[f64], w: &[f64]) -> Result<MomentEnvelope> {
    if t.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            found: w.len(),
        });
    }
    if t.len() < 2 {
        return Err(Error::TooFewSamples {
            found: t.len(),
            needed: 2,
        });
    }
    let slope = t
        .windows(2)
        .zip(w.windows(2))
        .map(|(tt, ww)| ((ww[1] - ww[0]) / (tt[1] - tt[0])).abs())
        .fold(0.0, f64::max);
    let base = w[0];
    let max_excess = t
        .iter()
        .zip(w)
        .map(|(ti, wi)| wi - base - slope * (ti - t[0] + 1.0))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MomentEnvelope {
        base,
        slope,
        max_excess,
    })
}
