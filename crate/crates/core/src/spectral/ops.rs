//! Exact spectral multipliers: derivatives, curl, divergence, Laplacian,
//! fractional powers `Λʳ = |k|ʳ`, the Leray projector and the 2/3 filter.

use num_complex::Complex64;

use super::field::{SpectralField, SpectralScalar};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `∂_axis f`, applied to every component.
pub fn partial(field: &SpectralField, axis: usize) -> SpectralField {
    let grid = *field.grid();
    let mut out = field.clone();
    for idx in 0..grid.len() {
        let ik = I * grid.derivative_wavevector(idx)[axis];
        for a in 0..3 {
            out.component_mut(a)[idx] *= ik;
        }
    }
    out
}

/// `∇φ`.
pub fn gradient(phi: &SpectralScalar) -> SpectralField {
    let grid = *phi.grid();
    SpectralField::from_fn(grid, |idx, _| {
        let k = grid.derivative_wavevector(idx);
        let p = phi.coeffs()[idx];
        [I * k[0] * p, I * k[1] * p, I * k[2] * p]
    })
}

/// `∇·f`.
pub fn divergence(field: &SpectralField) -> SpectralScalar {
    let grid = *field.grid();
    let mut out = SpectralScalar::zeros(grid);
    for idx in 0..grid.len() {
        let k = grid.derivative_wavevector(idx);
        let v = field.at(idx);
        out.coeffs_mut()[idx] = I * (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]);
    }
    out
}

/// `∇×f ↔ ik×f̂`.
pub fn curl(field: &SpectralField) -> SpectralField {
    let grid = *field.grid();
    SpectralField::from_fn(grid, |idx, _| {
        let k = grid.derivative_wavevector(idx);
        let v = field.at(idx);
        [
            I * (v[2] * k[1] - v[1] * k[2]),
            I * (v[0] * k[2] - v[2] * k[0]),
            I * (v[1] * k[0] - v[0] * k[1]),
        ]
    })
}

/// `Δf ↔ -|k|² f̂`.
pub fn laplacian(field: &SpectralField) -> SpectralField {
    let grid = *field.grid();
    field.apply_multiplier(|idx| -grid.k2(idx))
}

/// `|k|ʳ` with the convention `Λʳ(0) = 0` for `r > 0` and `Λ⁰ = I`.
#[inline]
pub fn lambda_symbol(k2: f64, r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else if k2 == 0.0 {
        0.0
    } else {
        k2.powf(0.5 * r)
    }
}

/// `Λʳ f` with `Λ = (-Δ)^{1/2}`; negative powers are rejected.
pub fn lambda_pow(field: &SpectralField, r: f64) -> Result<SpectralField> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Λ^r requires r ≥ 0, got {r}"
        )));
    }
    let grid = *field.grid();
    Ok(field.apply_multiplier(|idx| lambda_symbol(grid.k2(idx), r)))
}

/// Orthogonal projection onto divergence-free fields, `(I - kkᵀ/|k|²) f̂`.
/// The `k = 0` mode passes through unchanged.
pub fn leray_project(field: &SpectralField) -> SpectralField {
    let grid = *field.grid();
    let mut out = field.clone();
    for idx in 0..grid.len() {
        let k = grid.derivative_wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let v = field.at(idx);
        let d = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
        out.set(idx, [v[0] - d * k[0], v[1] - d * k[1], v[2] - d * k[2]]);
    }
    out
}

/// Zeroes every mode with some `|m_i|` above the dealias cutoff.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let mut out = field.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(field: &mut SpectralField) {
    let grid = *field.grid();
    let zero = Complex64::default();
    for idx in 0..grid.len() {
        if !grid.retained(idx) {
            field.set(idx, [zero; 3]);
        }
    }
}
