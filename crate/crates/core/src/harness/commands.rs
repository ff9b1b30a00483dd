//! Operations behind the CLI subcommands other than `simulate`, each
//! working on files of a run directory.

use std::fs;
use std::path::{Path, PathBuf};

use super::observers::{DifferenceObserver, GevreyObserver, DIFFERENCE_COLUMN, ENERGY_COLUMN};
use super::run::{read_csv, write_csv};
use crate::decay::fit::{fit_exponent, DecayFit};
use crate::decay::moments::{m0_membership, moment_matrices, M0Membership, MomentMatrices, MomentSample};
use crate::error::{Error, Result};
use crate::gevrey::{GevreyParams, DEFAULT_TAIL_FLOOR};
use crate::heat::HeatFlow;
use crate::spectral::snapshot::load_state;
use crate::spectral::SolenoidalState;
use crate::stepper::Observer;

fn require(path: &Path) -> Result<PathBuf> {
    if path.exists() {
        Ok(path.to_path_buf())
    } else {
        Err(Error::MissingInput(path.display().to_string()))
    }
}

/// Every state saved in a run directory, sorted by time: `initial.hmsf`,
/// `snapshots/*.hmsf` and `final.hmsf`.
pub fn run_states(dir: &Path) -> Result<Vec<SolenoidalState>> {
    let mut paths = vec![require(&dir.join("initial.hmsf"))?];
    let snaps = dir.join("snapshots");
    if snaps.is_dir() {
        let mut inner: Vec<PathBuf> = fs::read_dir(&snaps)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "hmsf"))
            .collect();
        inner.sort();
        paths.extend(inner);
    }
    let fin = dir.join("final.hmsf");
    if fin.exists() {
        paths.push(fin);
    }
    let mut states = paths.iter().map(|p| load_state(p)).collect::<Result<Vec<_>>>()?;
    states.sort_by(|a, b| a.time.total_cmp(&b.time));
    states.dedup_by(|a, b| a.time == b.time);
    Ok(states)
}

fn observe_all(obs: &mut dyn Observer, states: &[SolenoidalState]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let rows = states.iter().map(|s| obs.observe(s)).collect::<Result<Vec<_>>>()?;
    Ok((obs.columns(), rows))
}

/// `‖D(t)‖²` at every saved state against the heat flow of the initial
/// one, written to `heat_compare.csv`.
pub fn heat_compare(dir: &Path) -> Result<Vec<Vec<f64>>> {
    let states = run_states(dir)?;
    let mut obs = DifferenceObserver {
        flow: HeatFlow::new(states[0].clone()),
    };
    let (cols, rows) = observe_all(&mut obs, &states)?;
    write_csv(&dir.join("heat_compare.csv"), &cols, &rows)?;
    Ok(rows)
}

/// Gevrey records at every saved state, written to `gevrey_track.csv`.
pub fn gevrey_track(dir: &Path, params: GevreyParams) -> Result<Vec<Vec<f64>>> {
    params.validate()?;
    let states = run_states(dir)?;
    let mut obs = GevreyObserver {
        params,
        floor: DEFAULT_TAIL_FLOOR,
    };
    let (cols, rows) = observe_all(&mut obs, &states)?;
    write_csv(&dir.join("gevrey_track.csv"), &cols, &rows)?;
    Ok(rows)
}

/// Power-law fit of `column` against the first column of a CSV.
pub fn decay_fit(csv: &Path, column: &str, window: (f64, f64), allow_log: bool) -> Result<DecayFit> {
    let (cols, rows) = read_csv(&require(csv)?)?;
    let c = cols
        .iter()
        .position(|n| n == column)
        .ok_or_else(|| Error::MissingInput(format!("column {column:?} in {}; have {cols:?}", csv.display())))?;
    let t: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let y: Vec<f64> = rows.iter().map(|r| r[c]).collect();
    fit_exponent(&t, &y, window, allow_log)
}

/// Column used by [`decay_fit`] when none is given.
pub fn default_fit_column(csv: &Path) -> Result<String> {
    let (cols, _) = read_csv(&require(csv)?)?;
    for name in [ENERGY_COLUMN, DIFFERENCE_COLUMN] {
        if cols.iter().any(|c| c == name) {
            return Ok(name.into());
        }
    }
    cols.get(1)
        .cloned()
        .ok_or_else(|| Error::Format(format!("{} has fewer than two columns", csv.display())))
}

/// Moment matrices rebuilt from `moment_integrands.csv`, the energy fit in
/// `fits.csv` and `initial.hmsf`.
pub fn moments(dir: &Path) -> Result<(MomentMatrices, M0Membership)> {
    let (_, rows) = read_csv(&require(&dir.join("moment_integrands.csv"))?)?;
    let samples: Vec<MomentSample> = rows
        .iter()
        .map(|r| {
            if r.len() < 19 {
                return Err(Error::Format(format!("moment row has {} entries, need 19", r.len())));
            }
            Ok(MomentSample {
                t: r[0],
                a: std::array::from_fn(|i| std::array::from_fn(|j| r[1 + 3 * i + j])),
                c: std::array::from_fn(|i| std::array::from_fn(|j| r[10 + 3 * i + j])),
            })
        })
        .collect::<Result<_>>()?;
    let fit = energy_fit_from(dir)?;
    let initial = load_state(&require(&dir.join("initial.hmsf"))?)?;
    let mm = moment_matrices(&samples, &initial.b, &fit)?;
    let mem = m0_membership(&mm, 0.05);
    write_moments_csv(&dir.join("moments.csv"), &mm, &mem)?;
    Ok((mm, mem))
}

fn energy_fit_from(dir: &Path) -> Result<DecayFit> {
    let path = require(&dir.join("fits.csv"))?;
    let mut r = csv::Reader::from_path(&path).map_err(|e| Error::Format(e.to_string()))?;
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        if rec.get(0) == Some(ENERGY_COLUMN) {
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Format(format!("bad field {i} in {}", path.display())))
            };
            return Ok(DecayFit {
                exponent: num(1)?,
                prefactor: num(2)?,
                window: (num(3)?, num(4)?),
                residual: num(5)?,
                log_correction: rec.get(6) == Some("true"),
                samples: num(7)? as usize,
            });
        }
    }
    Err(Error::MissingInput(format!("energy fit row in {}", path.display())))
}

pub(crate) fn write_moments_csv(path: &Path, mm: &MomentMatrices, mem: &M0Membership) -> Result<()> {
    let mut cols = Vec::new();
    let mut row = Vec::new();
    for (name, mat) in [("A_tilde", &mm.a_tilde), ("C_tilde", &mm.c_tilde), ("xB0", &mm.x_b0)] {
        for (i, r) in mat.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                cols.push(format!("{name}_{}{}", i + 1, j + 1));
                row.push(*v);
            }
        }
    }
    for (name, v) in [
        ("horizon", mm.horizon),
        ("tail_bound", mm.tail_bound),
        ("tail_fraction", mm.tail_fraction),
        ("symmetry_defect_A", mm.symmetry_defect()),
        ("antisymmetry_defect_C", mm.antisymmetry_defect()),
        ("scalar_defect", mem.scalar_defect),
        ("scalar_defect_error", mem.scalar_error),
        ("C_defect", mem.c_defect),
        ("C_defect_error", mem.c_error),
        ("is_member", if mem.is_member { 1.0 } else { 0.0 }),
    ] {
        cols.push(name.into());
        row.push(v);
    }
    write_csv(path, &cols, &[row])
}
