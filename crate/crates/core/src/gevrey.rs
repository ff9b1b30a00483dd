//! Gevrey norms `‖Λʳ e^{τΛ} w‖₂²`, the radius schedule
//! `τ(t) = √(τ₀² + αt)`, spectral-tail radius estimates and the three
//! interpolation inequalities
//!
//! ```text
//! ‖Λʳe^{τΛ}u‖² ≤ 2‖Λʳu‖² + 2τ²‖Λ^{r+1}e^{τΛ}u‖²                 (I)
//! ‖Λᵖe^{τΛ}u‖² ≤ e‖Λᵖu‖² + (2τ)^{2q}‖Λ^{p+q}e^{τΛ}u‖²            (II)
//! ‖Λ^q u‖²     ≤ c(p,q) τ^{p−2q} ‖u‖ ‖Λᵖe^{τΛ}u‖,  2q ≥ p ≥ 0     (III)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::field::mode_norm;
use crate::spectral::{SolenoidalState, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GevreyParams {
    /// Sobolev index, above 3/2.
    pub r: f64,
    /// Auxiliary index, below 3/2.
    pub s: f64,
    pub tau0: f64,
    /// Schedule rate, in `(0, 1/2]` and at most `tau0²`.
    pub alpha_tau: f64,
}

impl Default for GevreyParams {
    fn default() -> Self {
        Self {
            r: 11.0 / 4.0,
            s: 11.0 / 8.0,
            tau0: 0.5,
            alpha_tau: 0.25,
        }
    }
}

impl GevreyParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.r > 1.5) {
            return bad(format!("r must exceed 3/2, got {}", self.r));
        }
        if !(self.s < 1.5) {
            return bad(format!("s must be below 3/2, got {}", self.s));
        }
        if !(self.tau0 > 0.0) {
            return bad(format!("tau0 must be positive, got {}", self.tau0));
        }
        if !(self.alpha_tau > 0.0 && self.alpha_tau <= 0.5) {
            return bad(format!("alpha must lie in (0, 1/2], got {}", self.alpha_tau));
        }
        if self.alpha_tau > self.tau0 * self.tau0 {
            return bad(format!(
                "alpha = {} exceeds tau0² = {}",
                self.alpha_tau,
                self.tau0 * self.tau0
            ));
        }
        Ok(())
    }
}

/// `√(τ₀² + αt)`.
pub fn tau_schedule(t: f64, params: &GevreyParams) -> f64 {
    (params.tau0 * params.tau0 + params.alpha_tau * t).sqrt()
}

/// `ln ‖Λʳ e^{τΛ} w‖₂²`, accumulated with log-sum-exp; `-∞` for the zero field.
pub fn gevrey_log_norm(field: &SpectralField, r: f64, tau: f64) -> Result<f64> {
    check_exponents(r, tau)?;
    let grid = *field.grid();
    let mut terms = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    for idx in 0..grid.len() {
        let a2 = mode_norm(&field.at(idx)).powi(2);
        if a2 == 0.0 {
            continue;
        }
        let k = grid.k2(idx).sqrt();
        let lw = if k == 0.0 {
            if r > 0.0 {
                continue;
            }
            0.0
        } else {
            2.0 * r * k.ln() + 2.0 * tau * k
        };
        let lt = lw + a2.ln();
        peak = peak.max(lt);
        terms.push(lt);
    }
    if terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    Ok(grid.volume().ln() + peak + sum.ln())
}

fn check_exponents(r: f64, tau: f64) -> Result<()> {
    if !(r >= 0.0) || !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Gevrey norm needs r ≥ 0 and tau ≥ 0, got r = {r}, tau = {tau}"
        )));
    }
    Ok(())
}

/// `L³ Σ_k |k|^{2r} e^{2τ|k|} |ŵ(k)|²`.
///
/// Fails with [`Error::Overflow`] naming the `|k|` of the dominant mode if
/// the value is beyond `f64` range.
pub fn gevrey_norm(field: &SpectralField, r: f64, tau: f64) -> Result<f64> {
    let ln = gevrey_log_norm(field, r, tau)?;
    let v = ln.exp();
    if v.is_finite() {
        return Ok(v);
    }
    let grid = *field.grid();
    let (mut best, mut kbest) = (f64::NEG_INFINITY, 0.0);
    for idx in 0..grid.len() {
        let a = mode_norm(&field.at(idx));
        let k = grid.k2(idx).sqrt();
        if a == 0.0 || k == 0.0 {
            continue;
        }
        let lt = 2.0 * r * k.ln() + 2.0 * tau * k + 2.0 * a.ln();
        if lt > best {
            best = lt;
            kbest = k;
        }
    }
    Err(Error::Overflow { k: kbest })
}

/// Fraction of `‖Λʳe^{τΛ}w‖²` carried by the outermost layer of retained
/// modes (some `|m_i|` equal to the dealias cutoff).
pub fn top_shell_fraction(field: &SpectralField, r: f64, tau: f64) -> Result<f64> {
    check_exponents(r, tau)?;
    let grid = *field.grid();
    let cut = grid.dealias_cutoff();
    let total = gevrey_log_norm(field, r, tau)?;
    if total == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let mut frac = 0.0;
    for idx in 0..grid.len() {
        let m = grid.modes(idx);
        if m.iter().map(|x| x.abs()).max() != Some(cut) {
            continue;
        }
        let a2 = mode_norm(&field.at(idx)).powi(2);
        if a2 == 0.0 {
            continue;
        }
        let k = grid.k2(idx).sqrt();
        let lt = grid.volume().ln() + 2.0 * r * k.ln() + 2.0 * tau * k + a2.ln();
        frac += (lt - total).exp();
    }
    Ok(frac)
}

/// Largest admissible top-layer fraction for a record to count as resolved.
pub const RESOLUTION_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GevreyRecord {
    pub t: f64,
    pub tau: f64,
    /// `‖Λʳu‖²`
    pub j_r: f64,
    /// `‖ΛʳB‖²`
    pub h_r: f64,
    /// `‖Λʳe^{τΛ}u‖²`
    pub g_r: f64,
    /// `‖Λʳe^{τΛ}B‖²`
    pub k_r: f64,
    pub n_r: f64,
    pub m_r: f64,
    /// `M_r τ^{2(γ+r)}`, once `γ` is known.
    pub ratio: Option<f64>,
    pub top_fraction: f64,
    pub resolved: bool,
}

pub fn gevrey_record(state: &SolenoidalState, params: &GevreyParams) -> Result<GevreyRecord> {
    let tau = tau_schedule(state.time, params);
    let r = params.r;
    let j_r = gevrey_norm(&state.u, r, 0.0)?;
    let h_r = gevrey_norm(&state.b, r, 0.0)?;
    let g_r = gevrey_norm(&state.u, r, tau)?;
    let k_r = gevrey_norm(&state.b, r, tau)?;
    let m_r = g_r + k_r;
    let top = if m_r > 0.0 {
        (top_shell_fraction(&state.u, r, tau)? * g_r + top_shell_fraction(&state.b, r, tau)? * k_r) / m_r
    } else {
        0.0
    };
    Ok(GevreyRecord {
        t: state.time,
        tau,
        j_r,
        h_r,
        g_r,
        k_r,
        n_r: j_r + h_r,
        m_r,
        ratio: None,
        top_fraction: top,
        resolved: top < RESOLUTION_TOLERANCE,
    })
}

/// Records at every state, with the bound ratio filled in when `gamma` is given.
pub fn track_gevrey(
    states: &[SolenoidalState],
    params: &GevreyParams,
    gamma: Option<f64>,
) -> Result<Vec<GevreyRecord>> {
    params.validate()?;
    let mut out = states
        .iter()
        .map(|s| gevrey_record(s, params))
        .collect::<Result<Vec<_>>>()?;
    if let Some(g) = gamma {
        set_bound_ratio(&mut out, g, params.r);
    }
    Ok(out)
}

/// Fills `ratio = M_r τ^{2(γ+r)}`.
pub fn set_bound_ratio(records: &mut [GevreyRecord], gamma: f64, r: f64) {
    for rec in records {
        rec.ratio = Some(rec.m_r * rec.tau.powf(2.0 * (gamma + r)));
    }
}

/// One side-by-side evaluation of an inequality `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    /// Right side without the multiplicative constant in (III), complete in (I), (II).
    pub rhs: f64,
    /// `lhs / rhs`.
    pub implied: f64,
    /// Largest `implied` compatible with the inequality.
    pub ceiling: f64,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64, ceiling: f64) -> Self {
        let implied = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        Self {
            lhs,
            rhs,
            implied,
            ceiling,
        }
    }

    pub fn holds(&self) -> bool {
        self.implied <= self.ceiling * (1.0 + 1e-12)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InterpolationReport {
    /// (I) with `r = p`.
    pub first: InequalityCheck,
    pub second: InequalityCheck,
    /// `None` outside `2q ≥ p`, `τ > 0`.
    pub third: Option<InequalityCheck>,
    /// `q = 0` makes (II) trivially true.
    pub second_degenerate: bool,
}

impl InterpolationReport {
    pub fn violated(&self) -> bool {
        !self.first.holds() || !self.second.holds() || self.third.map_or(false, |c| !c.holds())
    }
}

/// Sharp constant in (III): `max_x x^a e^{−x} = (a/e)^a` with `a = 2q − p`.
pub fn third_constant(p: f64, q: f64) -> f64 {
    let a = 2.0 * q - p;
    if a == 0.0 {
        1.0
    } else {
        (a / std::f64::consts::E).powf(a)
    }
}

/// Implied constants of (I)–(III) for a single mode at `|k| = rho`.
pub fn interpolation_modewise(rho: f64, p: f64, q: f64, tau: f64) -> [f64; 3] {
    // divided through by e^{2τρ} so large arguments do not overflow
    let d = (-2.0 * tau * rho).exp();
    let first = 1.0 / (2.0 * d + 2.0 * tau * tau * rho * rho);
    let second = 1.0 / (std::f64::consts::E * d + (2.0 * tau * rho).powf(2.0 * q));
    let third = (tau * rho).powf(2.0 * q - p) * (-tau * rho).exp();
    [first, second, third]
}

pub fn interpolation_check(field: &SpectralField, p: f64, q: f64, tau: f64) -> Result<InterpolationReport> {
    if !(p >= 0.0 && q >= 0.0 && tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "inequalities need p, q, tau ≥ 0, got p = {p}, q = {q}, tau = {tau}"
        )));
    }
    let g = |r: f64, t: f64| gevrey_norm(field, r, t);
    let first = InequalityCheck::new(
        g(p, tau)?,
        2.0 * g(p, 0.0)? + 2.0 * tau * tau * g(p + 1.0, tau)?,
        1.0,
    );
    let second = InequalityCheck::new(
        g(p, tau)?,
        std::f64::consts::E * g(p, 0.0)? + (2.0 * tau).powf(2.0 * q) * g(p + q, tau)?,
        1.0,
    );
    let third = if 2.0 * q >= p && tau > 0.0 {
        Some(InequalityCheck::new(
            g(q, 0.0)?,
            tau.powf(p - 2.0 * q) * field.norm_sq().sqrt() * g(p, tau)?.sqrt(),
            third_constant(p, q),
        ))
    } else {
        None
    };
    Ok(InterpolationReport {
        first,
        second,
        third,
        second_degenerate: q == 0.0,
    })
}

/// Exponential decay rate of a spectrum, as a proxy for the analyticity radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// Least-squares slope of `−ln max_shell |ŵ|` against `|k|`, clipped at 0.
    pub tau_est: f64,
    /// `tau_est / √3`.
    pub radius: f64,
    /// RMS residual of the linear fit.
    pub fit_residual: f64,
    pub shells: usize,
}

/// Minimum number of shells in the tail window.
pub const MIN_TAIL_SHELLS: usize = 8;

/// Relative level below which a shell counts as empty.
pub const DEFAULT_TAIL_FLOOR: f64 = 1e-13;

/// [`radius_estimate_with`] at the default floor.
pub fn radius_estimate(field: &SpectralField) -> Result<RadiusEstimate> {
    radius_estimate_with(field, DEFAULT_TAIL_FLOOR)
}

/// Fits `ln max_{shell} |ŵ(k)| ≈ c − τ|k|` over shells of width `dk`.
///
/// The tail window starts one shell past the spectral peak and ends at the
/// earlier of the last shell inside the retained cube and the last shell
/// before one whose maximum drops below `floor` times the peak.
pub fn radius_estimate_with(field: &SpectralField, floor: f64) -> Result<RadiusEstimate> {
    radius_from_fields(&[field], floor)
}

/// Radius estimate of a state, taking shell maxima over both fields.
pub fn radius_estimate_state(state: &SolenoidalState, floor: f64) -> Result<RadiusEstimate> {
    radius_from_fields(&[&state.u, &state.b], floor)
}

fn radius_from_fields(fields: &[&SpectralField], floor: f64) -> Result<RadiusEstimate> {
    let grid = *fields[0].grid();
    let dk = grid.dk();
    let last_inside = (grid.dealias_cutoff() - 1).max(0) as usize;
    let nshell = last_inside + 1;
    let mut best = vec![(0.0f64, 0.0f64); nshell];
    for idx in 0..grid.len() {
        if !grid.retained(idx) {
            continue;
        }
        let k = grid.k2(idx).sqrt();
        let s = (k / dk).round() as usize;
        if s >= nshell {
            continue;
        }
        for f in fields {
            let a = mode_norm(&f.at(idx));
            if a > best[s].0 {
                best[s] = (a, k);
            }
        }
    }
    let (peak_shell, peak) = best
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (s, &(a, _))| if a > acc.1 { (s, a) } else { acc });
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    if peak > 0.0 {
        for &(a, k) in &best[peak_shell + 1..] {
            if !(a > floor * peak) {
                break;
            }
            xs.push(k);
            ys.push(-a.ln());
        }
    }
    if xs.len() < MIN_TAIL_SHELLS {
        return Err(Error::TooFewShells {
            found: xs.len(),
            needed: MIN_TAIL_SHELLS,
        });
    }
    let (slope, intercept) = crate::decay::fit::least_squares(&xs, &ys);
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    let tau_est = slope.max(0.0);
    Ok(RadiusEstimate {
        tau_est,
        radius: tau_est / 3f64.sqrt(),
        fit_residual: rms,
        shells: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn single(grid: GridSpec, m: [i64; 3], a: f64) -> SpectralField {
        let mut f = SpectralField::zeros(grid);
        let z = Complex64::default();
        let c = Complex64::new(a, 0.0);
        f.set(grid.index_of_mode(m), [z, c, z]);
        f.set(grid.index_of_mode([-m[0], -m[1], -m[2]]), [z, c, z]);
        f
    }

    #[test]
    fn single_mode_closed_form() {
        let grid = GridSpec::new(8, 2.0 * PI).unwrap();
        let a = 0.3;
        let f = single(grid, [1, 0, 0], a);
        let v = gevrey_norm(&f, 2.0, 0.5).unwrap();
        let expect = grid.volume() * 2.0 * a * a * 1f64.exp();
        assert!((v - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn overflow_names_the_wavenumber() {
        let grid = GridSpec::new(8, 2.0 * PI).unwrap();
        let f = single(grid, [2, 0, 0], 1.0);
        match gevrey_norm(&f, 1.0, 400.0) {
            Err(Error::Overflow { k }) => assert!((k - 2.0).abs() < 1e-12),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn schedule_identities() {
        let p = GevreyParams::default();
        p.validate().unwrap();
        assert_eq!(tau_schedule(0.0, &p), p.tau0);
        let t = 7.5;
        let tau = tau_schedule(t, &p);
        assert!((tau * tau - p.tau0 * p.tau0 - p.alpha_tau * t).abs() < 1e-14);
        // with α = τ₀², (1+t)^{-1/2} = τ₀/τ
        assert!(((1.0 + t).powf(-0.5) - p.tau0 / tau).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        let ok = GevreyParams::default();
        assert!(GevreyParams { r: 1.5, ..ok }.validate().is_err());
        assert!(GevreyParams { s: 1.5, ..ok }.validate().is_err());
        assert!(GevreyParams { alpha_tau: 0.3, ..ok }.validate().is_err());
        assert!(GevreyParams { tau0: 1.0, alpha_tau: 0.6, ..ok }.validate().is_err());
    }

    #[test]
    fn degenerate_second_inequality_is_flagged() {
        let grid = GridSpec::new(8, 2.0 * PI).unwrap();
        let f = single(grid, [1, 1, 0], 1.0);
        let rep = interpolation_check(&f, 1.0, 0.0, 0.3).unwrap();
        assert!(rep.second_degenerate);
        assert!(rep.third.is_none());
        assert!(!rep.violated());
    }

    #[test]
    fn synthetic_exponential_tail() {
        let grid = GridSpec::new(32, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(grid, |idx, k| {
            let r = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            let a = Complex64::new((-0.7 * r).exp(), 0.0);
            if grid.k2(idx) == 0.0 {
                [Complex64::default(); 3]
            } else {
                [a, Complex64::default(), Complex64::default()]
            }
        });
        let est = radius_estimate(&f).unwrap();
        assert!((est.tau_est - 0.7).abs() < 0.02, "{est:?}");
        assert!((est.radius - est.tau_est / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn flat_spectrum_has_zero_rate() {
        let grid = GridSpec::new(32, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(grid, |_, _| [Complex64::new(1.0, 0.0); 3]);
        let est = radius_estimate(&f).unwrap();
        assert!(est.tau_est.abs() < 1e-12);
    }

    #[test]
    fn too_few_shells_is_an_error() {
        let grid = GridSpec::new(8, 2.0 * PI).unwrap();
        let f = single(grid, [1, 0, 0], 1.0);
        assert!(matches!(radius_estimate(&f), Err(Error::TooFewShells { .. })));
    }
}
