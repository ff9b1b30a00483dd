//! Energy and derivative norms sampled along a trajectory.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::ops::lambda_symbol;
use crate::spectral::{SolenoidalState, SpectralField};

/// A scalar sampled at increasing times.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Series {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
}

impl Series {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: t.len(),
                found: v.len(),
            });
        }
        Ok(Self { t, v })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn push(&mut self, t: f64, v: f64) {
        self.t.push(t);
        self.v.push(v);
    }
}

/// `‖Λᵐ f‖₂² = L³ Σ |k|^{2m} |f̂(k)|²`.
pub fn lambda_norm_sq(field: &SpectralField, m: f64) -> Result<f64> {
    if !(m >= 0.0) {
        return Err(Error::InvalidParameter(format!("derivative order must be ≥ 0, got {m}")));
    }
    let grid = *field.grid();
    Ok(field.weighted_norm_sq(|idx| lambda_symbol(grid.k2(idx), 2.0 * m)))
}

/// `E = ‖u‖₂² + ‖B‖₂²`.
pub fn energy(state: &SolenoidalState) -> f64 {
    state.energy()
}

/// `‖Λᵐu‖₂² + ‖ΛᵐB‖₂²`.
pub fn derivative_energy(state: &SolenoidalState, m: f64) -> Result<f64> {
    Ok(lambda_norm_sq(&state.u, m)? + lambda_norm_sq(&state.b, m)?)
}

pub fn energy_series(states: &[SolenoidalState]) -> Series {
    Series {
        t: states.iter().map(|s| s.time).collect(),
        v: states.iter().map(energy).collect(),
    }
}

pub fn derivative_series(states: &[SolenoidalState], m: f64) -> Result<Series> {
    Ok(Series {
        t: states.iter().map(|s| s.time).collect(),
        v: states
            .iter()
            .map(|s| derivative_energy(s, m))
            .collect::<Result<_>>()?,
    })
}

/// `‖∇v‖∞² + ‖∇w‖∞²` from the grid maxima of the gradient tensors.
pub fn gradient_sup_sq(state: &SolenoidalState) -> f64 {
    let sup = |f: &SpectralField| -> f64 {
        let mut best = vec![0.0f64; f.grid().len()];
        for axis in 0..3 {
            let p = crate::spectral::ops::partial(f, axis).to_physical();
            for (idx, b) in best.iter_mut().enumerate() {
                let v = p.at(idx);
                *b += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            }
        }
        best.into_iter().fold(0.0, f64::max)
    };
    sup(&state.u) + sup(&state.b)
}
