//! Integrating-factor time stepping.
//!
//! Writing the system as `∂t U = ΔU + N(U)`, the viscous and resistive
//! Laplacian is absorbed exactly through the factor `e^{−|k|²t}`, the same
//! kernel as in the Duhamel representation
//!
//! ```text
//! û(k,t) = e^{−t|k|²} û₀(k) − ∫₀ᵗ e^{−(t−s)|k|²} Ĥ(k,s) ds.
//! ```
//!
//! Only the nonlinear part is discretized, by classical RK4 (or forward
//! Euler) in the variable `e^{|k|²t} Û`.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heat::propagate;
use crate::rhs::symbol_parts;
use crate::spectral::snapshot::{load_state, save_state, Precision};
use crate::spectral::{GridSpec, SolenoidalState, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Integrating-factor classical fourth-order Runge-Kutta.
    IfRk4,
    /// Integrating-factor forward Euler, first order.
    IfEuler,
}

/// Which states [`evolve`] keeps in the returned [`Trajectory`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Retain {
    /// Every snapshot time.
    #[default]
    All,
    /// Only the initial and final states.
    Endpoints,
    /// The initial and final states plus the listed snapshot times.
    Times(Vec<f64>),
}

fn default_safety() -> f64 {
    0.4
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    /// Sorted times in `[0, t_end]` at which observers run.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_safety")]
    pub safety: f64,
    /// With `false` the flow is pure diffusion, evaluated exactly.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    #[serde(default)]
    pub retain: Retain,
}

impl StepperConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            scheme: Scheme::IfRk4,
            t_end,
            snapshot_times: Vec::new(),
            safety: default_safety(),
            nonlinear: true,
            retain: Retain::All,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn with_retain(mut self, retain: Retain) -> Self {
        self.retain = retain;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if !(self.safety > 0.0) {
            return bad(format!("safety factor must be positive, got {}", self.safety));
        }
        if self.snapshot_times.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("snapshot times must be strictly increasing".into());
        }
        if let (Some(&a), Some(&b)) = (self.snapshot_times.first(), self.snapshot_times.last()) {
            if a < 0.0 || b > self.t_end {
                return bad(format!("snapshot times must lie in [0, {}]", self.t_end));
            }
        }
        Ok(())
    }
}

/// `safety · min(1/k², 1/(k·max(|u|∞, |B|∞)), 1/(k²·|B|∞))` with `k` the
/// largest retained wavenumber. The last term is the whistler limit of the
/// Hall term, whose frequency grows like `|k|²|B|`.
pub fn dt_max(grid: &GridSpec, u_max: f64, b_max: f64, safety: f64) -> f64 {
    let k = grid.k_max_retained();
    let mut bound = 1.0 / (k * k);
    let v = u_max.max(b_max);
    if v > 0.0 {
        bound = bound.min(1.0 / (k * v));
    }
    if b_max > 0.0 {
        bound = bound.min(1.0 / (k * k * b_max));
    }
    safety * bound
}

/// [`dt_max`] at a state.
pub fn stability_bound(state: &SolenoidalState, safety: f64) -> Result<f64> {
    let p = state.u.to_physical().max_magnitude();
    let b = state.b.to_physical().max_magnitude();
    Ok(dt_max(state.grid(), p, b, safety))
}

/// Nonlinear tendency `(−Ĥ, −M̂)` and the physical maxima of `u`, `B`.
fn tendency(state: &SolenoidalState) -> Result<(SolenoidalState, f64, f64)> {
    let p = symbol_parts(state)?;
    let m = p.m_hat();
    let mut du = p.h_hat;
    du.scale_in_place(-1.0);
    let mut db = m;
    db.scale_in_place(-1.0);
    Ok((SolenoidalState::new(du, db, state.time)?, p.u_max, p.b_max))
}

/// Builds a state mode by mode from same-grid inputs.
fn map_modes<const K: usize>(
    inputs: [&SolenoidalState; K],
    time: f64,
    f: impl Fn(usize, [Complex64; K]) -> Complex64,
) -> SolenoidalState {
    let grid = *inputs[0].grid();
    let field = |which: usize| {
        let comps = std::array::from_fn(|a| {
            (0..grid.len())
                .map(|idx| {
                    let v = std::array::from_fn(|s| {
                        let st = inputs[s];
                        let fld = if which == 0 { &st.u } else { &st.b };
                        fld.component(a)[idx]
                    });
                    f(idx, v)
                })
                .collect()
        });
        SpectralField::from_components(grid, comps).expect("grid checked by caller")
    };
    SolenoidalState {
        u: field(0),
        b: field(1),
        time,
    }
}

/// Advances by `cfg.dt`.
///
/// The step is refused with [`Error::StabilityViolation`] when `dt` exceeds
/// [`dt_max`] at the current state. With `cfg.nonlinear == false` every
/// coefficient is multiplied by `e^{−|k|²dt}` and `dt` may be negative.
pub fn step(state: &SolenoidalState, cfg: &StepperConfig) -> Result<SolenoidalState> {
    step_by(state, cfg, cfg.dt)
}

fn step_by(state: &SolenoidalState, cfg: &StepperConfig, h: f64) -> Result<SolenoidalState> {
    if !h.is_finite() || (cfg.nonlinear && h <= 0.0) {
        return Err(Error::InvalidParameter(format!("cannot step by dt = {h}")));
    }
    if !cfg.nonlinear {
        return Ok(propagate(state, h));
    }
    let grid = *state.grid();
    let k2: Vec<f64> = (0..grid.len()).map(|i| grid.k2(i)).collect();
    let ef: Vec<f64> = k2.iter().map(|k| (-k * h).exp()).collect();
    let t1 = state.time + h;

    let (a1, umax, bmax) = tendency(state)?;
    let bound = dt_max(&grid, umax, bmax, cfg.safety);
    if h > bound * (1.0 + 1e-12) {
        return Err(Error::StabilityViolation {
            dt: h,
            dt_max: bound,
            time: state.time,
        });
    }
    let mut next = match cfg.scheme {
        Scheme::IfEuler => map_modes([state, &a1], t1, |i, [s, a]| ef[i] * (s + a * h)),
        Scheme::IfRk4 => {
            let eh: Vec<f64> = k2.iter().map(|k| (-k * h * 0.5).exp()).collect();
            let tm = state.time + 0.5 * h;
            let s2 = map_modes([state, &a1], tm, |i, [s, a]| eh[i] * (s + a * (0.5 * h)));
            let (a2, _, _) = tendency(&s2)?;
            drop(s2);
            let s3 = map_modes([state, &a2], tm, |i, [s, a]| eh[i] * s + a * (0.5 * h));
            let (a3, _, _) = tendency(&s3)?;
            drop(s3);
            let s4 = map_modes([state, &a3], t1, |i, [s, a]| ef[i] * s + a * (h * eh[i]));
            let (a4, _, _) = tendency(&s4)?;
            drop(s4);
            map_modes([state, &a1, &a2, &a3, &a4], t1, |i, [s, b1, b2, b3, b4]| {
                ef[i] * s + (ef[i] * b1 + (b2 + b3) * (2.0 * eh[i]) + b4) * (h / 6.0)
            })
        }
    };
    crate::spectral::ops::dealias_in_place(&mut next.u);
    crate::spectral::ops::dealias_in_place(&mut next.b);
    Ok(next)
}

/// A diagnostic evaluated at every snapshot time.
pub trait Observer {
    /// Column names of the rows returned by [`Observer::observe`].
    fn columns(&self) -> Vec<String>;
    fn observe(&mut self, state: &SolenoidalState) -> Result<Vec<f64>>;
}

/// Rows of one observer, one per snapshot time.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticSeries {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DiagnosticSeries {
    /// Column `name` across all rows.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

/// Output of [`evolve`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Times at which observers ran.
    pub times: Vec<f64>,
    /// One series per observer, in registration order.
    pub diagnostics: Vec<DiagnosticSeries>,
    /// Retained states, sorted by time.
    pub snapshots: Vec<SolenoidalState>,
    /// The state at `t_end`.
    pub final_state: SolenoidalState,
    pub steps: usize,
    pub scheme: Scheme,
    pub dt: f64,
}

impl Trajectory {
    pub fn initial(&self) -> &SolenoidalState {
        &self.snapshots[0]
    }

    /// Retained state at time `t`, matched to within `1e-9·max(1, t)`.
    pub fn state_at(&self, t: f64) -> Result<&SolenoidalState> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.snapshots
            .iter()
            .find(|s| (s.time - t).abs() <= tol)
            .ok_or(Error::NotSnapshotted(t))
    }
}

fn keep(retain: &Retain, t: f64) -> bool {
    match retain {
        Retain::All => true,
        Retain::Endpoints => false,
        Retain::Times(ts) => ts.iter().any(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1.0)),
    }
}

/// Integrates from `state0` to `state0.time + t_end`.
///
/// Snapshot times are measured from `state0.time` and are hit exactly by
/// shortening the step before them. Observers see each snapshot once, in
/// order. With nonlinearity disabled, every output is the exact heat
/// propagator applied to `state0`, with no accumulated stepping error.
pub fn evolve(
    state0: &SolenoidalState,
    cfg: &StepperConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory> {
    cfg.validate()?;
    if !state0.is_finite() {
        return Err(Error::NonFinite { time: state0.time });
    }
    let t0 = state0.time;
    let mut diagnostics: Vec<DiagnosticSeries> = observers
        .iter()
        .map(|o| DiagnosticSeries {
            columns: o.columns(),
            rows: Vec::new(),
        })
        .collect();
    let mut times = Vec::new();
    let mut snapshots = vec![state0.clone()];
    let mut steps = 0usize;

    let mut targets: Vec<f64> = cfg.snapshot_times.clone();
    if targets.last().map_or(true, |&t| t < cfg.t_end) {
        targets.push(cfg.t_end);
    }
    let is_snapshot = |t: f64| cfg.snapshot_times.iter().any(|&s| s == t);

    let mut state = state0.clone();
    let mut elapsed = 0.0;
    for &target in &targets {
        while elapsed < target {
            let remaining = target - elapsed;
            // avoid a sliver step right before the target
            let h = if remaining <= cfg.dt * (1.0 + 1e-9) {
                remaining
            } else {
                cfg.dt
            };
            if cfg.nonlinear {
                state = step_by(&state, cfg, h)?;
                elapsed = if h == remaining { target } else { elapsed + h };
                state.time = t0 + elapsed;
            } else {
                elapsed = if h == remaining { target } else { elapsed + h };
            }
            steps += 1;
        }
        if !cfg.nonlinear {
            state = propagate(state0, target);
        }
        if !state.is_finite() {
            return Err(Error::NonFinite { time: state.time });
        }
        if is_snapshot(target) {
            times.push(state.time);
            for (o, d) in observers.iter_mut().zip(diagnostics.iter_mut()) {
                d.rows.push(o.observe(&state)?);
            }
            if target > 0.0 && keep(&cfg.retain, target) {
                snapshots.push(state.clone());
            }
        }
    }
    if snapshots.last().map_or(true, |s| s.time != state.time) {
        snapshots.push(state.clone());
    }
    Ok(Trajectory {
        times,
        diagnostics,
        snapshots,
        final_state: state,
        steps,
        scheme: cfg.scheme,
        dt: cfg.dt,
    })
}

/// Stepper metadata stored next to a checkpointed state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub time: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub steps: usize,
    pub nonlinear: bool,
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes the state to `path` and the metadata next to it, under the same
/// name with extension `json`.
pub fn save_checkpoint(path: &Path, state: &SolenoidalState, meta: &CheckpointMeta) -> Result<()> {
    save_state(path, state, Precision::Double)?;
    fs::write(sidecar(path), serde_json::to_string_pretty(meta)?)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(SolenoidalState, CheckpointMeta)> {
    let state = load_state(path)?;
    let meta: CheckpointMeta = serde_json::from_str(&fs::read_to_string(sidecar(path))?)?;
    Ok((state, meta))
}
