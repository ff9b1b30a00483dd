//! Time integral of the energy and the Fourier splitting quantities.

use serde::Serialize;

use super::fit::{fit_exponent, least_squares};
use super::series::Series;
use crate::error::{Error, Result};
use crate::spectral::field::mode_norm;
use crate::spectral::SolenoidalState;

/// How `Φ(t) = ∫₀ᵗ E(s) ds` grows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum PhiGrowth {
    /// `Φ → phi_inf`.
    Bounded { phi_inf: f64 },
    /// `Φ ≈ c ln(t+1)`.
    Log { c: f64 },
    /// `Φ ≈ c (t+1)^{power}`, `power = 1 − α`.
    Power { c: f64, power: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiReport {
    pub phi: Series,
    pub growth: PhiGrowth,
    /// Fitted decay exponent of `E` used for the classification.
    pub energy_exponent: Option<f64>,
}

/// Half-width of the band around exponent 1 classified as logarithmic.
pub const LOG_BAND: f64 = 0.1;

/// Trapezoidal `Φ` over the samples of `energy`.
///
/// Growth is classified from the exponent `α` of `E` fitted on `t ≥ 1`:
/// bounded for `α > 1 + δ`, logarithmic for `|α − 1| ≤ δ`, power `1 − α`
/// otherwise, with `δ = LOG_BAND`. The coefficient of the matching model is
/// then fitted to `Φ`.
pub fn phi_integral(energy: &Series) -> Result<PhiReport> {
    let (t, e) = (&energy.t, &energy.v);
    if t.is_empty() {
        return Err(Error::TooFewSamples { found: 0, needed: 2 });
    }
    let mut phi = vec![0.0; t.len()];
    for i in 1..t.len() {
        phi[i] = phi[i - 1] + 0.5 * (t[i] - t[i - 1]) * (e[i] + e[i - 1]);
    }
    let phi = Series::new(t.clone(), phi)?;
    if e.iter().all(|&v| v == 0.0) {
        return Ok(PhiReport {
            phi,
            growth: PhiGrowth::Bounded { phi_inf: 0.0 },
            energy_exponent: None,
        });
    }
    let t_hi = *t.last().unwrap();
    let fit = fit_exponent(t, e, (1.0, t_hi), false)?;
    let a = fit.exponent;
    let late: Vec<(f64, f64)> = t
        .iter()
        .zip(&phi.v)
        .filter(|(t, _)| **t >= 1.0)
        .map(|(&t, &p)| (t, p))
        .collect();
    let through_origin = |basis: &dyn Fn(f64) -> f64| -> f64 {
        let num: f64 = late.iter().map(|(t, p)| basis(*t) * p).sum();
        let den: f64 = late.iter().map(|(t, _)| basis(*t).powi(2)).sum();
        num / den
    };
    let growth = if a > 1.0 + LOG_BAND {
        // Φ(∞) = Φ(T) + tail of the fitted law
        let tail = fit.prefactor * (t_hi + 1.0).powf(1.0 - a) / (a - 1.0);
        PhiGrowth::Bounded {
            phi_inf: phi.v.last().unwrap() + tail,
        }
    } else if a >= 1.0 - LOG_BAND {
        PhiGrowth::Log {
            c: through_origin(&|t| (t + 1.0).ln()),
        }
    } else {
        let power = 1.0 - a;
        let xs: Vec<f64> = late.iter().map(|(t, _)| (t + 1.0).powf(power)).collect();
        let ys: Vec<f64> = late.iter().map(|(_, p)| *p).collect();
        let (c, _) = least_squares(&xs, &ys);
        PhiGrowth::Power { c, power }
    };
    Ok(PhiReport {
        phi,
        growth,
        energy_exponent: Some(a),
    })
}

/// `L³ Σ_{|k| ≤ g} (|û(k)|² + |B̂(k)|²)`.
///
/// The measure factor `L³` makes the sum over all modes equal `E`.
pub fn ball_integral(state: &SolenoidalState, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius must be positive, got {g}")));
    }
    let grid = *state.grid();
    let g2 = g * g;
    let mut s = 0.0;
    for idx in 0..grid.len() {
        if grid.k2(idx) <= g2 {
            s += mode_norm(&state.u.at(idx)).powi(2) + mode_norm(&state.b.at(idx)).powi(2);
        }
    }
    Ok(grid.volume() * s)
}

/// `g(t) = √(γ / (2(t+1)))`.
pub fn splitting_radius(gamma: f64, t: f64) -> f64 {
    (gamma / (2.0 * (t + 1.0))).sqrt()
}

/// `G(t) = exp(2∫₀ᵗ g²) = (t+1)^γ`.
pub fn splitting_weight(gamma: f64, t: f64) -> f64 {
    (t + 1.0).powf(gamma)
}

/// One evaluation of the splitting inequality
///
/// ```text
/// d/dt (G E) ≤ 2 g² G ∫_{|k| ≤ g} (|û|² + |B̂|²)
/// ```
///
/// where `dE/dt = −2(‖∇u‖² + ‖∇B‖²)` is the exact dissipation, the nonlinear
/// terms doing no work.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplittingRecord {
    pub t: f64,
    pub g: f64,
    pub weight: f64,
    pub energy: f64,
    pub ball: f64,
    /// `d/dt (G E)`.
    pub lhs: f64,
    /// `2 g² G · ball`.
    pub rhs: f64,
}

pub fn splitting_record(state: &SolenoidalState, gamma: f64) -> Result<SplittingRecord> {
    let t = state.time;
    let g = splitting_radius(gamma, t);
    let w = splitting_weight(gamma, t);
    let e = state.energy();
    let diss = super::series::derivative_energy(state, 1.0)?;
    let ball = ball_integral(state, g)?;
    Ok(SplittingRecord {
        t,
        g,
        weight: w,
        energy: e,
        ball,
        lhs: w * (2.0 * g * g * e - 2.0 * diss),
        rhs: 2.0 * g * g * w * ball,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64) -> Series {
        let t: Vec<f64> = (0..4000).map(|i| i as f64 * 0.05).collect();
        let v = t.iter().map(|&t| f(t)).collect();
        Series::new(t, v).unwrap()
    }

    #[test]
    fn zero_energy() {
        let r = phi_integral(&series(|_| 0.0)).unwrap();
        assert!(r.phi.v.iter().all(|&p| p == 0.0));
        assert_eq!(r.growth, PhiGrowth::Bounded { phi_inf: 0.0 });
    }

    #[test]
    fn inverse_square_is_bounded_by_one() {
        let r = phi_integral(&series(|t| (t + 1.0).powi(-2))).unwrap();
        match r.growth {
            PhiGrowth::Bounded { phi_inf } => assert!((phi_inf - 1.0).abs() < 1e-3),
            g => panic!("{g:?}"),
        }
    }

    #[test]
    fn inverse_is_logarithmic() {
        let r = phi_integral(&series(|t| 1.0 / (t + 1.0))).unwrap();
        let last = r.phi.len() - 1;
        let exact = (r.phi.t[last] + 1.0).ln();
        assert!((r.phi.v[last] - exact).abs() < 1e-3);
        match r.growth {
            PhiGrowth::Log { c } => assert!((c - 1.0).abs() < 1e-3),
            g => panic!("{g:?}"),
        }
    }

    #[test]
    fn slow_decay_grows_as_a_power() {
        let r = phi_integral(&series(|t| (t + 1.0).powf(-0.5))).unwrap();
        match r.growth {
            PhiGrowth::Power { c, power } => {
                assert!((power - 0.5).abs() < 1e-6);
                assert!((c - 2.0).abs() < 1e-2);
            }
            g => panic!("{g:?}"),
        }
    }
}
