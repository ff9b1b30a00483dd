use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{Diagnostic, ExperimentConfig};
use super::commands::write_moments_csv;
use super::observers::*;
use crate::decay::exponents::diff_decay_exponent;
use crate::decay::fit::{correlation, fit_exponent, least_squares, two_sided_fit, DecayFit, TwoSidedFit};
use crate::decay::init::{heat_rate, make_initial_data};
use crate::decay::integrals::{phi_integral, PhiReport};
use crate::decay::moments::{
    m0_membership, moment_envelope, moment_matrices, M0Membership, MomentEnvelope, MomentMatrices, MomentSample,
    BOUNDARY_TOLERANCE,
};
use crate::decay::series::Series;
use crate::error::{Error, Result};
use crate::heat::HeatFlow;
use crate::spectral::snapshot::{save_state, Precision};
use crate::spectral::SolenoidalState;
use crate::stepper::{evolve, save_checkpoint, CheckpointMeta, DiagnosticSeries, Observer, Trajectory};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes a CSV with a header row.
pub fn write_csv(path: &Path, columns: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(columns).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
    let columns = r.headers().map_err(csv_err)?.iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("{}: not a number: {s:?}", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((columns, rows))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Exponents fitted to the gevrey bound ratio and tail radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GevreySummary {
    pub gamma: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub overflow: bool,
    pub unresolved_records: usize,
    pub records_in_window: usize,
}

impl GevreySummary {
    pub fn spread(&self) -> f64 {
        self.ratio_max / self.ratio_min
    }
}

/// Line `tau_est² ≈ a + s t` over the fit window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusSummary {
    pub slope: f64,
    pub intercept: f64,
    pub correlation: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSummary {
    pub matrices: MomentMatrices,
    pub symmetry_defect: f64,
    pub antisymmetry_defect: f64,
    pub membership: M0Membership,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedSummary {
    pub envelope: MomentEnvelope,
    /// `slope / (1 + ‖u₀‖₂ + ‖B₀‖₂)²`.
    pub normalized_slope: f64,
    pub max_boundary_fraction: f64,
    pub boundary_ok: bool,
}

/// Fits and summaries derived from the observer series of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub heat_rate: f64,
    pub energy: Option<TwoSidedFit>,
    pub derivatives: Vec<(f64, DecayFit)>,
    pub difference: Option<DecayFit>,
    pub difference_target: Option<f64>,
    pub gevrey: Option<GevreySummary>,
    pub radius: Option<RadiusSummary>,
    pub moments: Option<MomentSummary>,
    pub weighted: Option<WeightedSummary>,
    pub phi: Option<PhiReport>,
    /// Analyses that could not be carried out, with the reason.
    pub problems: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ManifestFlags {
    pub non_finite: bool,
    pub gevrey_overflow: bool,
    pub unresolved_gevrey_records: usize,
    pub moment_tail_flagged: bool,
    pub boundary_exceeded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub status: String,
    pub error: Option<String>,
    pub partial: bool,
    pub wall_time_seconds: f64,
    pub steps: usize,
    pub files: Vec<String>,
    pub flags: ManifestFlags,
    pub problems: Vec<String>,
}

/// Everything a completed run produced.
pub struct RunOutcome {
    pub dir: PathBuf,
    pub trajectory: Trajectory,
    pub report: RunReport,
    pub manifest: Manifest,
}

impl RunOutcome {
    /// Series of the observer for `diag`, if it was enabled.
    pub fn series(&self, config: &ExperimentConfig, diag: Diagnostic) -> Option<&DiagnosticSeries> {
        series_of(config, &self.trajectory, diag)
    }
}

fn enabled_order(config: &ExperimentConfig) -> Vec<Diagnostic> {
    Diagnostic::ALL.into_iter().filter(|d| config.enabled(*d)).collect()
}

fn series_of<'a>(config: &ExperimentConfig, traj: &'a Trajectory, diag: Diagnostic) -> Option<&'a DiagnosticSeries> {
    let pos = enabled_order(config).iter().position(|d| *d == diag)?;
    traj.diagnostics.get(pos)
}

fn csv_name(d: Diagnostic) -> &'static str {
    match d {
        Diagnostic::Energy => "energy.csv",
        Diagnostic::Difference => "difference.csv",
        Diagnostic::Gevrey => "gevrey.csv",
        Diagnostic::Moments => "moment_integrands.csv",
        Diagnostic::WeightedMoment => "weighted_moment.csv",
    }
}

fn column(s: &DiagnosticSeries, i: usize) -> Vec<f64> {
    s.rows.iter().map(|r| r[i]).collect()
}

fn in_window(t: f64, w: (f64, f64)) -> bool {
    t >= w.0 && t <= w.1
}

/// Fits and summaries from the observer series.
pub fn analyze(config: &ExperimentConfig, traj: &Trajectory) -> RunReport {
    let mut rep = RunReport {
        heat_rate: heat_rate(config.init.sigma),
        ..Default::default()
    };
    let note = |what: &str, e: Error| format!("{what}: {e}");
    let mut problems = Vec::new();

    if let Some(s) = series_of(config, traj, Diagnostic::Energy) {
        let t = column(s, 0);
        let e = column(s, 1);
        let w = config.window(config.fit_windows.energy);
        match two_sided_fit(&t, &e, w) {
            Ok(f) => rep.energy = Some(f),
            Err(err) => problems.push(note("energy fit", err)),
        }
        let wd = config.window(config.fit_windows.derivatives);
        for (i, &m) in config.derivative_orders.iter().enumerate() {
            match fit_exponent(&t, &column(s, 2 + i), wd, false) {
                Ok(f) => rep.derivatives.push((m, f)),
                Err(err) => problems.push(note(&format!("derivative fit m = {m}"), err)),
            }
        }
        match phi_integral(&Series { t, v: e }) {
            Ok(p) => rep.phi = Some(p),
            Err(err) => problems.push(note("phi integral", err)),
        }
    }

    if let Some(s) = series_of(config, traj, Diagnostic::Difference) {
        let w = config.window(config.fit_windows.difference);
        let alpha = rep.heat_rate.min(2.5);
        match diff_decay_exponent(alpha) {
            Ok((p, log)) => {
                rep.difference_target = Some(p);
                match fit_exponent(&column(s, 0), &column(s, 1), w, log) {
                    Ok(f) => rep.difference = Some(f),
                    Err(err) => problems.push(note("difference fit", err)),
                }
            }
            Err(err) => problems.push(note("difference target", err)),
        }
    }

    if let Some(s) = series_of(config, traj, Diagnostic::Gevrey) {
        let w = config.window(config.fit_windows.gevrey);
        let t = column(s, 0);
        let tau = column(s, 1);
        let m_r = column(s, 7);
        let resolved = column(s, 9);
        let overflow = m_r.iter().any(|x| !x.is_finite());
        let unresolved = resolved.iter().filter(|&&f| f == 0.0).count();
        if let Some(fit) = &rep.energy {
            let gamma = fit.central.exponent;
            let r = config.gevrey.r;
            let ratios: Vec<f64> = (0..t.len())
                .filter(|&i| in_window(t[i], w))
                .map(|i| m_r[i] * tau[i].powf(2.0 * (gamma + r)))
                .collect();
            rep.gevrey = Some(GevreySummary {
                gamma,
                ratio_min: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
                ratio_max: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                overflow,
                unresolved_records: unresolved,
                records_in_window: ratios.len(),
            });
        } else {
            problems.push("gevrey ratio: no energy exponent available".to_string());
        }
        let est = column(s, 10);
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..t.len())
            .filter(|&i| in_window(t[i], w) && est[i].is_finite())
            .map(|i| (t[i], est[i] * est[i]))
            .unzip();
        if xs.len() >= 3 {
            let (slope, intercept) = least_squares(&xs, &ys);
            rep.radius = Some(RadiusSummary {
                slope,
                intercept,
                correlation: correlation(&xs, &ys),
                samples: xs.len(),
            });
        } else {
            problems.push(format!("radius fit: only {} estimates in window", xs.len()));
        }
    }

    if let Some(s) = series_of(config, traj, Diagnostic::Moments) {
        let samples: Vec<MomentSample> = s
            .rows
            .iter()
            .map(|r| MomentSample {
                t: r[0],
                a: std::array::from_fn(|i| std::array::from_fn(|j| r[1 + 3 * i + j])),
                c: std::array::from_fn(|i| std::array::from_fn(|j| r[10 + 3 * i + j])),
            })
            .collect();
        match &rep.energy {
            Some(fit) => match moment_matrices(&samples, &traj.initial().b, &fit.central) {
                Ok(mm) => {
                    rep.moments = Some(MomentSummary {
                        symmetry_defect: mm.symmetry_defect(),
                        antisymmetry_defect: mm.antisymmetry_defect(),
                        membership: m0_membership(&mm, config.m0_tolerance),
                        matrices: mm,
                    })
                }
                Err(err) => problems.push(note("moment matrices", err)),
            },
            None => problems.push("moment matrices: no energy fit for the horizon tail".to_string()),
        }
    }

    if let Some(s) = series_of(config, traj, Diagnostic::WeightedMoment) {
        let t = column(s, 0);
        let wv = column(s, 1);
        let frac = column(s, 2);
        match moment_envelope(&t, &wv) {
            Ok(env) => {
                let s0 = traj.initial();
                let scale = (1.0 + s0.u.norm_sq().sqrt() + s0.b.norm_sq().sqrt()).powi(2);
                let max_frac = frac.iter().cloned().fold(0.0, f64::max);
                rep.weighted = Some(WeightedSummary {
                    normalized_slope: env.slope / scale,
                    envelope: env,
                    max_boundary_fraction: max_frac,
                    boundary_ok: max_frac < BOUNDARY_TOLERANCE,
                });
            }
            Err(err) => problems.push(note("weighted moment envelope", err)),
        }
    }
    rep.problems = problems;
    rep
}

fn write_report_csvs(dir: &Path, config: &ExperimentConfig, traj: &Trajectory, rep: &RunReport, files: &mut Vec<String>) -> Result<()> {
    for d in enabled_order(config) {
        let s = series_of(config, traj, d).expect("observer registered");
        let mut columns = s.columns.clone();
        let mut rows = s.rows.clone();
        if d == Diagnostic::Gevrey {
            // bound ratio M_r τ^{2(γ+r)} with γ from the energy fit
            columns.insert(8, "ratio=M_r*tau^(2(gamma+r))".into());
            let gamma = rep.energy.as_ref().map(|f| f.central.exponent);
            for r in rows.iter_mut() {
                let v = gamma.map_or(f64::NAN, |g| r[7] * r[1].powf(2.0 * (g + config.gevrey.r)));
                r.insert(8, v);
            }
        }
        write_csv(&dir.join(csv_name(d)), &columns, &rows)?;
        files.push(csv_name(d).into());
    }

    let fit_cols: Vec<String> = ["series", "exponent", "prefactor", "t_lo", "t_hi", "residual", "log_correction", "samples"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut fit_rows: Vec<(String, DecayFit)> = Vec::new();
    if let Some(f) = &rep.energy {
        fit_rows.push((ENERGY_COLUMN.into(), f.central));
        fit_rows.push(("E lower envelope q=0.1".into(), f.lower));
        fit_rows.push(("E upper envelope q=0.9".into(), f.upper));
    }
    for (m, f) in &rep.derivatives {
        fit_rows.push((derivative_column(*m), *f));
    }
    if let Some(f) = &rep.difference {
        fit_rows.push((DIFFERENCE_COLUMN.into(), *f));
    }
    if !fit_rows.is_empty() {
        let mut w = csv::Writer::from_path(dir.join("fits.csv")).map_err(csv_err)?;
        w.write_record(&fit_cols).map_err(csv_err)?;
        for (name, f) in &fit_rows {
            w.write_record([
                name.clone(),
                format!("{}", f.exponent),
                format!("{}", f.prefactor),
                format!("{}", f.window.0),
                format!("{}", f.window.1),
                format!("{}", f.residual),
                format!("{}", f.log_correction),
                format!("{}", f.samples),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        files.push("fits.csv".into());
    }

    if let Some(p) = &rep.phi {
        let rows: Vec<Vec<f64>> = p.phi.t.iter().zip(&p.phi.v).map(|(t, v)| vec![*t, *v]).collect();
        write_csv(&dir.join("phi.csv"), &["t".into(), "Phi(t)=int_0^t E(s) ds".into()], &rows)?;
        files.push("phi.csv".into());
    }

    if let Some(m) = &rep.moments {
        write_moments_csv(&dir.join("moments.csv"), &m.matrices, &m.membership)?;
        files.push("moments.csv".into());
    }
    Ok(())
}

fn build_observers(config: &ExperimentConfig, initial: &SolenoidalState) -> Vec<Box<dyn Observer>> {
    let mut obs: Vec<Box<dyn Observer>> = Vec::new();
    for d in enabled_order(config) {
        obs.push(match d {
            Diagnostic::Energy => Box::new(EnergyObserver {
                orders: config.derivative_orders.clone(),
            }),
            Diagnostic::Difference => Box::new(DifferenceObserver {
                flow: HeatFlow::new(initial.clone()),
            }),
            Diagnostic::Gevrey => Box::new(GevreyObserver {
                params: config.gevrey,
                floor: config.radius_floor,
            }),
            Diagnostic::Moments => Box::new(MomentObserver),
            Diagnostic::WeightedMoment => Box::new(WeightedMomentObserver),
        });
    }
    obs
}

/// Relative path of a retained intermediate snapshot.
pub fn snapshot_name(t: f64) -> String {
    format!("snapshots/t_{t:012.6}.hmsf")
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(m)?)?;
    Ok(())
}

/// Runs an experiment and fills its output directory:
///
/// | file                    | content                                         |
/// |-------------------------|-------------------------------------------------|
/// | `config.json`           | the configuration with all defaults             |
/// | `initial.hmsf`          | initial state snapshot                          |
/// | `final.hmsf`, `final.json` | checkpoint and stepper metadata              |
/// | `snapshots/t_*.hmsf`    | retained intermediate states                    |
/// | `<diagnostic>.csv`      | one per enabled observer                        |
/// | `fits.csv`, `phi.csv`, `moments.csv` | fitted exponents and integrals     |
/// | `report.json`           | every fit and summary                           |
/// | `manifest.json`         | hash, version, wall time, flags, file list      |
///
/// A run with `t_end = 0` writes only `initial.hmsf` and the manifest.
///
/// On failure the manifest is still written, marked partial, and the error
/// is returned.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();

    let mut manifest = Manifest {
        version: VERSION.into(),
        config_hash: config.hash()?,
        config: config.clone(),
        status: "running".into(),
        error: None,
        partial: true,
        wall_time_seconds: 0.0,
        steps: 0,
        files: Vec::new(),
        flags: ManifestFlags::default(),
        problems: Vec::new(),
    };

    let result = (|| -> Result<(Trajectory, RunReport)> {
        let init = make_initial_data(config.init.sigma, config.init.amplitude, config.init.seed, config.grid)?;
        save_state(&dir.join("initial.hmsf"), &init, Precision::Double)?;
        files.push("initial.hmsf".into());
        if config.stepper.t_end == 0.0 {
            let traj = evolve(&init, &config.stepper, &mut [])?;
            return Ok((traj, RunReport::default()));
        }
        fs::write(dir.join("config.json"), config.to_json()?)?;
        files.push("config.json".into());
        let mut boxed = build_observers(config, &init);
        let mut refs: Vec<&mut dyn Observer> = Vec::new();
        for b in boxed.iter_mut() {
            refs.push(b.as_mut());
        }
        let traj = evolve(&init, &config.stepper, &mut refs)?;
        save_checkpoint(
            &dir.join("final.hmsf"),
            &traj.final_state,
            &CheckpointMeta {
                time: traj.final_state.time,
                dt: traj.dt,
                scheme: traj.scheme,
                steps: traj.steps,
                nonlinear: config.stepper.nonlinear,
            },
        )?;
        files.push("final.hmsf".into());
        files.push("final.json".into());
        let inner: Vec<&SolenoidalState> = traj.snapshots[1..]
            .iter()
            .filter(|s| s.time != traj.final_state.time)
            .collect();
        if !inner.is_empty() {
            fs::create_dir_all(dir.join("snapshots"))?;
            for s in inner {
                let name = snapshot_name(s.time);
                save_state(&dir.join(&name), s, Precision::Double)?;
                files.push(name);
            }
        }
        let report = analyze(config, &traj);
        write_report_csvs(&dir, config, &traj, &report, &mut files)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        files.push("report.json".into());
        Ok((traj, report))
    })();

    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    files.push("manifest.json".into());
    manifest.files = files;
    match result {
        Ok((traj, report)) => {
            manifest.status = "ok".into();
            manifest.partial = false;
            manifest.steps = traj.steps;
            manifest.problems = report.problems.clone();
            manifest.flags = ManifestFlags {
                non_finite: false,
                gevrey_overflow: report.gevrey.as_ref().map_or(false, |g| g.overflow),
                unresolved_gevrey_records: report.gevrey.as_ref().map_or(0, |g| g.unresolved_records),
                moment_tail_flagged: report.moments.as_ref().map_or(false, |m| m.matrices.tail_flagged),
                boundary_exceeded: report.weighted.as_ref().map_or(false, |w| !w.boundary_ok),
            };
            write_manifest(&dir, &manifest)?;
            Ok(RunOutcome {
                dir,
                trajectory: traj,
                report,
                manifest,
            })
        }
        Err(e) => {
            manifest.status = "failed".into();
            manifest.error = Some(e.to_string());
            manifest.flags.non_finite = matches!(e, Error::NonFinite { .. });
            write_manifest(&dir, &manifest)?;
            Err(e)
        }
    }
}
