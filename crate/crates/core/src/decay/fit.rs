//! Power-law fits `y ≈ C (t+1)^{−p}` in log-log coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples inside a fit window.
pub const MIN_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `p` in `C (t+1)^{−p}`.
    pub exponent: f64,
    /// `C`.
    pub prefactor: f64,
    pub window: (f64, f64),
    /// RMS residual of the fit in `ln y`.
    pub residual: f64,
    /// The model carries the factor `1 + ln²(t+1)`.
    pub log_correction: bool,
    pub samples: usize,
}

impl DecayFit {
    /// Model value at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let l = (t + 1.0).ln();
        let corr = if self.log_correction { 1.0 + l * l } else { 1.0 };
        self.prefactor * (-self.exponent * l).exp() * corr
    }
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Pearson correlation of `x` and `y`.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

/// `(ln(t+1), ln y)` for the samples inside `window`.
fn log_samples(t: &[f64], y: &[f64], window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
    if t.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            found: y.len(),
        });
    }
    if !(window.0 >= 1.0) || !(window.1 > window.0) {
        return Err(Error::InvalidParameter(format!(
            "fit window must satisfy 1 ≤ t_lo < t_hi, got {window:?}"
        )));
    }
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&ti, &yi) in t.iter().zip(y) {
        if ti < window.0 || ti > window.1 {
            continue;
        }
        if !(yi > 0.0) {
            return Err(Error::NonPositiveSample { time: ti, value: yi });
        }
        lx.push((ti + 1.0).ln());
        ly.push(yi.ln());
    }
    if lx.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            found: lx.len(),
            needed: MIN_SAMPLES,
        });
    }
    Ok((lx, ly))
}

fn rms(x: &[f64], y: &[f64], slope: f64, intercept: f64) -> f64 {
    let s: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (s / x.len() as f64).sqrt()
}

/// Least squares of `ln y` against `ln(t+1)` on samples with `t` in `window`.
///
/// With `allow_log`, the model `C (t+1)^{−p} (1 + ln²(t+1))` is fitted too
/// and kept if its residual is lower.
pub fn fit_exponent(t: &[f64], y: &[f64], window: (f64, f64), allow_log: bool) -> Result<DecayFit> {
    let (lx, ly) = log_samples(t, y, window)?;
    let (slope, icept) = least_squares(&lx, &ly);
    let mut fit = DecayFit {
        exponent: -slope,
        prefactor: icept.exp(),
        window,
        residual: rms(&lx, &ly, slope, icept),
        log_correction: false,
        samples: lx.len(),
    };
    if allow_log {
        let lc: Vec<f64> = lx.iter().zip(&ly).map(|(l, y)| y - (1.0 + l * l).ln()).collect();
        let (s2, i2) = least_squares(&lx, &lc);
        let r2 = rms(&lx, &lc, s2, i2);
        if r2 < fit.residual {
            fit = DecayFit {
                exponent: -s2,
                prefactor: i2.exp(),
                residual: r2,
                log_correction: true,
                ..fit
            };
        }
    }
    Ok(fit)
}

/// Linear quantile regression of `ln y` on `ln(t+1)` at level `q`.
///
/// The check-loss minimizer of a two-parameter line passes through two of
/// the samples, so every pair is tried. `q = 0.1` gives a lower envelope,
/// `q = 0.9` an upper one.
pub fn quantile_fit(t: &[f64], y: &[f64], window: (f64, f64), q: f64) -> Result<DecayFit> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile must lie in (0, 1), got {q}")));
    }
    let (lx, ly) = log_samples(t, y, window)?;
    let loss = |s: f64, c: f64| -> f64 {
        lx.iter()
            .zip(&ly)
            .map(|(x, y)| {
                let r = y - c - s * x;
                if r >= 0.0 {
                    q * r
                } else {
                    (q - 1.0) * r
                }
            })
            .sum()
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..lx.len() {
        for j in i + 1..lx.len() {
            if lx[j] == lx[i] {
                continue;
            }
            let s = (ly[j] - ly[i]) / (lx[j] - lx[i]);
            let c = ly[i] - s * lx[i];
            let l = loss(s, c);
            if l < best.0 {
                best = (l, s, c);
            }
        }
    }
    let (_, s, c) = best;
    Ok(DecayFit {
        exponent: -s,
        prefactor: c.exp(),
        window,
        residual: rms(&lx, &ly, s, c),
        log_correction: false,
        samples: lx.len(),
    })
}

/// Least-squares fit with its 0.1 and 0.9 quantile envelopes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoSidedFit {
    pub central: DecayFit,
    pub lower: DecayFit,
    pub upper: DecayFit,
}

pub fn two_sided_fit(t: &[f64], y: &[f64], window: (f64, f64)) -> Result<TwoSidedFit> {
    Ok(TwoSidedFit {
        central: fit_exponent(t, y, window, false)?,
        lower: quantile_fit(t, y, window, 0.1)?,
        upper: quantile_fit(t, y, window, 0.9)?,
    })
}
