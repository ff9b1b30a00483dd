use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gevrey::GevreyParams;
use crate::spectral::GridSpec;
use crate::stepper::{Retain, Scheme, StepperConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitConfig {
    /// Spectral class: `|û₀(k)| ~ |k|^σ` near `k = 0`.
    pub sigma: f64,
    /// Largest pointwise magnitude of each initial field.
    pub amplitude: f64,
    pub seed: u64,
}

/// Observers a run can enable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnostic {
    /// `E(t)` and `‖Λᵐ(u,B)‖²` for each configured order.
    Energy,
    /// `‖D(t)‖²` against the heat flow of the initial data.
    Difference,
    /// Gevrey norms along the radius schedule, with the tail radius estimate.
    Gevrey,
    /// Spatial integrands of the moment matrices.
    Moments,
    /// `∫|x − x_c|(|u|² + |B|²)` and the boundary energy share.
    WeightedMoment,
}

impl Diagnostic {
    pub const ALL: [Diagnostic; 5] = [
        Diagnostic::Energy,
        Diagnostic::Difference,
        Diagnostic::Gevrey,
        Diagnostic::Moments,
        Diagnostic::WeightedMoment,
    ];
}

/// Per-diagnostic fit windows; `None` means the grid default `[2, 0.5(L/2π)²]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitWindows {
    #[serde(default)]
    pub energy: Option<(f64, f64)>,
    #[serde(default)]
    pub difference: Option<(f64, f64)>,
    #[serde(default)]
    pub derivatives: Option<(f64, f64)>,
    #[serde(default)]
    pub gevrey: Option<(f64, f64)>,
}

fn default_orders() -> Vec<f64> {
    vec![1.0, 2.0]
}

fn default_floor() -> f64 {
    crate::gevrey::DEFAULT_TAIL_FLOOR
}

fn default_tol() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub stepper: StepperConfig,
    pub init: InitConfig,
    #[serde(default)]
    pub gevrey: GevreyParams,
    pub diagnostics: Vec<Diagnostic>,
    /// Orders `m` of the derivative series.
    #[serde(default = "default_orders")]
    pub derivative_orders: Vec<f64>,
    #[serde(default)]
    pub fit_windows: FitWindows,
    /// Relative floor of the spectral tail used by the radius estimate.
    #[serde(default = "default_floor")]
    pub radius_floor: f64,
    /// Tolerance of the ℳ₀ membership defects.
    #[serde(default = "default_tol")]
    pub m0_tolerance: f64,
    pub output_dir: PathBuf,
}

/// Named presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// `n = 64`, `L = 32π`, `t ∈ [0, 128]`: the full-size reference run.
    Desk,
    /// `n = 16`, `L = 8π`, `t ∈ [0, 8]`: seconds, for plumbing checks.
    Smoke,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "smoke" => Ok(Profile::Smoke),
            other => Err(Error::InvalidParameter(format!("unknown profile {other:?}"))),
        }
    }
}

/// `0` followed by `count` geometrically spaced times from `first` to `last`.
pub fn log_spaced_times(first: f64, last: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    let ratio = (last / first).powf(1.0 / (count - 1) as f64);
    out.extend((0..count).map(|i| {
        if i + 1 == count {
            last
        } else {
            first * ratio.powi(i as i32)
        }
    }));
    out
}

impl ExperimentConfig {
    pub fn profile(profile: Profile, output_dir: impl Into<PathBuf>) -> Self {
        let (n, l, t_end, dt, count, amplitude) = match profile {
            Profile::Desk => (64, 32.0 * PI, 128.0, 0.075, 48, 0.1),
            Profile::Smoke => (16, 8.0 * PI, 8.0, 0.05, 24, 0.1),
        };
        let grid = GridSpec::new(n, l).expect("preset grid is valid");
        let stepper = StepperConfig {
            dt,
            scheme: Scheme::IfRk4,
            t_end,
            snapshot_times: log_spaced_times(0.25, t_end, count),
            safety: 0.4,
            nonlinear: true,
            retain: Retain::Endpoints,
        };
        Self {
            grid,
            stepper,
            init: InitConfig {
                sigma: 0.0,
                amplitude,
                seed: 3,
            },
            gevrey: GevreyParams::default(),
            diagnostics: Diagnostic::ALL.to_vec(),
            derivative_orders: default_orders(),
            fit_windows: FitWindows::default(),
            radius_floor: default_floor(),
            m0_tolerance: default_tol(),
            output_dir: output_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.stepper.validate()?;
        self.gevrey.validate()?;
        if !(self.init.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be ≥ 0, got {}", self.init.sigma)));
        }
        if self.derivative_orders.iter().any(|m| !(*m >= 0.0)) {
            return Err(Error::InvalidParameter("derivative orders must be ≥ 0".into()));
        }
        Ok(())
    }

    pub fn enabled(&self, d: Diagnostic) -> bool {
        self.diagnostics.contains(&d)
    }

    pub fn window(&self, w: Option<(f64, f64)>) -> (f64, f64) {
        w.unwrap_or_else(|| self.grid.default_fit_window())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the canonical JSON of everything except `output_dir`.
    pub fn hash(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output_dir");
        }
        let digest = Sha256::digest(serde_json::to_vec(&v)?);
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}
