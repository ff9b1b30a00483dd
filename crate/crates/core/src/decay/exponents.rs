//! Closed-form exponent bookkeeping for energy and difference decay.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Iterates `β ← min{α, 2β + ½}` from `β = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bootstrap {
    /// Successive values of `β`, starting at 0.
    pub trace: Vec<f64>,
    /// `min{α, 5/2}` once `β ≥ 1`, otherwise the fixpoint `α`.
    pub exponent: f64,
}

impl fmt::Display for Bootstrap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trace: Vec<String> = self.trace.iter().map(|b| format!("{b}")).collect();
        write!(f, "{} → {}", trace.join(", "), self.exponent)
    }
}

/// Energy decay exponent reached by bootstrapping the Fourier splitting
/// bound from initial data with heat-flow rate `α`.
///
/// While `β < 1` the time integral of the energy is not yet bounded and
/// each pass improves the rate to `min{α, 2β + ½}`. As soon as `β ≥ 1` the
/// integral is bounded and the rate jumps to `min{α, 5/2}`. For `α ≤ 1` the
/// iteration stops at its fixpoint `α`.
pub fn bootstrap_exponent(alpha: f64) -> Result<Bootstrap> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be finite and ≥ 0, got {alpha}")));
    }
    let mut beta = 0.0f64;
    let mut trace = vec![beta];
    while beta < 1.0 {
        let next = alpha.min(2.0 * beta + 0.5);
        if next == beta {
            break;
        }
        beta = next;
        trace.push(beta);
    }
    let exponent = if beta >= 1.0 { alpha.min(2.5) } else { beta };
    Ok(Bootstrap { trace, exponent })
}

/// Decay exponent of `‖D(t)‖₂²`, `D = (u − v, B − w)`, and whether the rate
/// carries the factor `1 + ln²(t+1)`:
///
/// ```text
/// α ∈ (1, 5/2]  →  5/2
/// α = 1         →  5/2, with log² factor
/// α ∈ [0, 1)    →  5/2 − 2(1 − α)
/// ```
pub fn diff_decay_exponent(alpha: f64) -> Result<(f64, bool)> {
    if !(0.0..=2.5).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must lie in [0, 5/2], got {alpha}")));
    }
    Ok(if alpha > 1.0 {
        (2.5, false)
    } else if alpha == 1.0 {
        (2.5, true)
    } else {
        (2.5 - 2.0 * (1.0 - alpha), false)
    })
}
