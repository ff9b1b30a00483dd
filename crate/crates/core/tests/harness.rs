use std::fs;
use std::path::Path;
use std::process::Command;

use hallmhd::harness::observers::{DIFFERENCE_COLUMN, ENERGY_COLUMN};
use hallmhd::harness::{read_csv, run, write_csv, Diagnostic, ExperimentConfig, Profile};
use hallmhd::spectral::snapshot::load_state;

fn smoke(dir: &Path) -> ExperimentConfig {
    ExperimentConfig::profile(Profile::Smoke, dir)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hallmhd"))
}

#[test]
fn zero_length_run_writes_only_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = smoke(dir.path());
    cfg.stepper.t_end = 0.0;
    cfg.stepper.snapshot_times = vec![0.0];
    let out = run(&cfg).unwrap();
    assert_eq!(out.trajectory.steps, 0);
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["initial.hmsf", "manifest.json"]);
    let s = load_state(&dir.path().join("initial.hmsf")).unwrap();
    assert_eq!(s, out.trajectory.final_state);
}

#[test]
fn runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let oa = run(&smoke(a.path())).unwrap();
    let ob = run(&smoke(b.path())).unwrap();
    assert_eq!(oa.manifest.config_hash, ob.manifest.config_hash);
    for f in ["energy.csv", "difference.csv", "gevrey.csv", "moment_integrands.csv", "weighted_moment.csv", "fits.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between identical runs");
    }
    assert_eq!(fs::read(a.path().join("final.hmsf")).unwrap(), fs::read(b.path().join("final.hmsf")).unwrap());
}

#[test]
fn linear_run_energy_csv_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = smoke(dir.path());
    cfg.stepper.nonlinear = false;
    cfg.diagnostics = vec![Diagnostic::Energy, Diagnostic::Difference];
    run(&cfg).unwrap();
    let s0 = load_state(&dir.path().join("initial.hmsf")).unwrap();
    let grid = *s0.grid();
    let (cols, rows) = read_csv(&dir.path().join("energy.csv")).unwrap();
    assert_eq!(cols[0], "t");
    assert_eq!(cols[1], ENERGY_COLUMN);
    for r in &rows {
        let t = r[0];
        let direct: f64 = (0..grid.len())
            .map(|i| {
                let m: f64 = s0.u.at(i).iter().chain(s0.b.at(i).iter()).map(|z| z.norm_sqr()).sum();
                (-2.0 * t * grid.k2(i)).exp() * m
            })
            .sum::<f64>()
            * grid.volume();
        assert!((r[1] - direct).abs() <= 1e-10 * direct, "t = {t}");
    }
    let (dcols, drows) = read_csv(&dir.path().join("difference.csv")).unwrap();
    assert_eq!(dcols[1], DIFFERENCE_COLUMN);
    assert!(drows.iter().all(|r| r[1] == 0.0));
}

#[test]
fn csv_headers_name_their_quantities() {
    let dir = tempfile::tempdir().unwrap();
    run(&smoke(dir.path())).unwrap();
    for f in ["energy.csv", "difference.csv", "gevrey.csv", "weighted_moment.csv", "phi.csv"] {
        let (cols, rows) = read_csv(&dir.path().join(f)).unwrap();
        assert_eq!(cols[0], "t", "{f}");
        assert!(cols[1..].iter().all(|c| c.len() > 1), "{f}: {cols:?}");
        assert!(rows.iter().all(|r| r.len() == cols.len()));
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("final.json")).unwrap()).unwrap();
    assert_eq!(sidecar["time"], 8.0);
}

#[test]
fn config_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = smoke(dir.path());
    let path = dir.path().join("c.json");
    fs::write(&path, cfg.to_json().unwrap()).unwrap();
    assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);
}

#[test]
fn cli_bootstrap_prints_trace() {
    let out = bin().args(["bootstrap", "--alpha", "3"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "0, 0.5, 1.5 → 2.5");
}

#[test]
fn cli_decay_fit_on_synthetic_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|i| {
            let t = 0.5 * i as f64;
            vec![t, 4.0 * (t + 1.0f64).powf(-2.5)]
        })
        .collect();
    write_csv(&path, &["t".into(), "E".into()], &rows).unwrap();
    let out = bin()
        .args(["decay-fit", "--input"])
        .arg(&path)
        .args(["--column", "E", "--window", "2", "19"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let exponent: f64 = text
        .split_whitespace()
        .skip_while(|w| *w != "exponent")
        .nth(1)
        .and_then(|w| w.parse().ok())
        .expect("exponent in output");
    assert!((exponent - 2.5).abs() < 1e-9, "{text}");
}

#[test]
fn cli_pipeline_on_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("run");
    let status = bin()
        .args(["simulate", "--profile", "smoke", "--output"])
        .arg(&d)
        .status()
        .unwrap();
    assert!(status.success());
    for sub in ["moments", "heat-compare", "gevrey-track"] {
        let out = bin().arg(sub).arg("--output").arg(&d).output().unwrap();
        assert!(out.status.success(), "{sub}: {}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["moments.csv", "heat_compare.csv", "gevrey_track.csv"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let (_, rows) = read_csv(&d.join("heat_compare.csv")).unwrap();
    assert_eq!(rows[0][1], 0.0);
}

#[test]
fn cli_reports_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["moments", "heat-compare", "gevrey-track"] {
        let out = bin().arg(sub).arg("--output").arg(dir.path()).output().unwrap();
        assert!(!out.status.success());
        assert!(!out.stderr.is_empty());
    }
    let out = bin()
        .args(["decay-fit", "--input"])
        .arg(dir.path().join("none.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
}
