//! Random localized divergence-free initial data of prescribed low-frequency
//! class.
//!
//! Each field is
//!
//! ```text
//! f̂(k) = P_k c(k) · |k|^σ · e^{−|k|²},   c(k) = Σ_{j=1..4} a_j e^{−ik·(x_c + x_j)}
//! ```
//!
//! with `a_j ~ N(0, I₃)`, offsets `x_j ~ N(0, 0.25² I₃)` around the box
//! centre `x_c`, `P_k` the Leray projector and the `k = 0` mode removed. The
//! result is real, localized near the centre and has `|f̂(k)| ~ |k|^σ` for
//! small `|k|`. Its heat flow then decays like
//!
//! ```text
//! ∫ e^{−2(t+1)|k|²} |k|^{2σ} dk ~ (t+1)^{−(3+2σ)/2},
//! ```
//!
//! so spectral class `σ` realizes the heat rate `α = (3 + 2σ)/2`. The field is
//! then scaled so its largest pointwise magnitude equals `amplitude`.
//!
//! Seeds: the master seed is expanded with splitmix64; the first output
//! seeds `u₀`, the second `B₀`. Each seeds a ChaCha8 stream.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectral::ops::leray_project;
use crate::spectral::{GridSpec, SolenoidalState, SpectralField};

const BUMPS: usize = 4;
const SPREAD: f64 = 0.25;

/// One splitmix64 step.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `(seed of u₀, seed of B₀)`.
pub fn field_seeds(master: u64) -> (u64, u64) {
    let mut s = master;
    let a = splitmix64(&mut s);
    let b = splitmix64(&mut s);
    (a, b)
}

/// `α = (3 + 2σ)/2`.
pub fn heat_rate(sigma: f64) -> f64 {
    (3.0 + 2.0 * sigma) / 2.0
}

/// One random field of class `sigma` with peak magnitude `amplitude`.
pub fn random_field(sigma: f64, amplitude: f64, seed: u64, grid: GridSpec) -> Result<SpectralField> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be ≥ 0, got {sigma}")));
    }
    if !amplitude.is_finite() {
        return Err(Error::InvalidParameter(format!("amplitude must be finite, got {amplitude}")));
    }
    grid.validate()?;
    if amplitude == 0.0 {
        return Ok(SpectralField::zeros(grid));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let xc = grid.center();
    let bumps: Vec<([f64; 3], [f64; 3])> = (0..BUMPS)
        .map(|_| {
            let a = [normal(), normal(), normal()];
            let x = [
                xc + SPREAD * normal(),
                xc + SPREAD * normal(),
                xc + SPREAD * normal(),
            ];
            (a, x)
        })
        .collect();

    let raw = SpectralField::from_fn(grid, |idx, k| {
        let k2 = grid.k2(idx);
        if k2 == 0.0 || !grid.retained(idx) {
            return [Complex64::default(); 3];
        }
        let envelope = k2.powf(0.5 * sigma) * (-k2).exp();
        let mut c = [Complex64::default(); 3];
        for (a, x) in &bumps {
            let phase = Complex64::from_polar(envelope, -(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
            for i in 0..3 {
                c[i] += phase * a[i];
            }
        }
        c
    });
    let f = leray_project(&raw);
    let peak = f.to_physical().max_magnitude();
    if peak == 0.0 {
        return Ok(f);
    }
    Ok(f.scaled(amplitude / peak))
}

/// Independent `u₀`, `B₀` of class `sigma` and peak magnitude `amplitude`.
pub fn make_initial_data(sigma: f64, amplitude: f64, seed: u64, grid: GridSpec) -> Result<SolenoidalState> {
    let (su, sb) = field_seeds(seed);
    let u = random_field(sigma, amplitude, su, grid)?;
    let b = random_field(sigma, amplitude, sb, grid)?;
    SolenoidalState::new(u, b, 0.0)
}
