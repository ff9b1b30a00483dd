use std::f64::consts::PI;

use hallmhd::decay::fit::fit_exponent;
use hallmhd::decay::init::{heat_rate, make_initial_data};
use hallmhd::decay::series::gradient_sup_sq;
use hallmhd::harness::config::log_spaced_times;
use hallmhd::heat::{difference_state, heat_evolve, restart_comparator, HeatFlow};
use hallmhd::spectral::{GridSpec, SolenoidalState};
use hallmhd::stepper::{evolve, StepperConfig};

fn data() -> SolenoidalState {
    make_initial_data(0.0, 0.3, 12, GridSpec::new(16, 8.0 * PI).unwrap()).unwrap()
}

#[test]
fn heat_energy_matches_direct_sum() {
    let s = data();
    let grid = *s.grid();
    let flow = HeatFlow::new(s.clone());
    for t in [0.0, 0.3, 2.0, 10.0] {
        let v = heat_evolve(&flow, t).unwrap();
        let direct: f64 = (0..grid.len())
            .map(|idx| {
                let m: f64 = s.u.at(idx).iter().chain(s.b.at(idx).iter()).map(|z| z.norm_sqr()).sum();
                (-2.0 * grid.k2(idx) * t).exp() * m
            })
            .sum::<f64>()
            * grid.volume();
        assert!((v.energy() - direct).abs() <= 1e-12 * direct);
    }
}

#[test]
fn semigroup_property() {
    let flow = HeatFlow::new(data());
    let (s, t) = (0.7, 1.9);
    let direct = heat_evolve(&flow, s + t).unwrap();
    let mid = heat_evolve(&flow, s).unwrap();
    let two = heat_evolve(&HeatFlow::new(mid), t).unwrap();
    assert!(direct.u.max_rel_diff(&two.u) < 1e-13);
    assert!(direct.b.max_rel_diff(&two.b) < 1e-13);
    assert!((two.time - direct.time).abs() < 1e-12);
}

#[test]
fn heat_energy_is_nonincreasing() {
    let flow = HeatFlow::new(data());
    let e: Vec<f64> = (0..50).map(|i| heat_evolve(&flow, 0.2 * i as f64).unwrap().energy()).collect();
    assert!(e.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn linear_trajectory_has_zero_difference() {
    let s = data();
    let cfg = StepperConfig::new(0.1, 3.0).linear().with_snapshots(vec![0.5, 1.0, 3.0]);
    let traj = evolve(&s, &cfg, &mut []).unwrap();
    let flow = HeatFlow::new(s);
    for st in &traj.snapshots {
        assert_eq!(difference_state(st, &flow).unwrap().energy(), 0.0);
    }
}

#[test]
fn restart_comparator_semigroup_on_linear_run() {
    let s = data();
    let cfg = StepperConfig::new(0.1, 3.0).linear().with_snapshots(vec![1.5, 3.0]);
    let traj = evolve(&s, &cfg, &mut []).unwrap();
    let restart = restart_comparator(&traj, 1.5).unwrap();
    assert_eq!(&heat_evolve(&restart, 0.0).unwrap(), traj.state_at(1.5).unwrap());
    let a = heat_evolve(&restart, 0.8).unwrap();
    let b = heat_evolve(&HeatFlow::new(s), 2.3).unwrap();
    assert!(a.u.max_rel_diff(&b.u) < 1e-13 && a.b.max_rel_diff(&b.b) < 1e-13);
    let zero = restart_comparator(&traj, 0.0).unwrap();
    assert_eq!(zero.initial(), traj.initial());
}

#[test]
fn difference_obeys_triangle_inequality() {
    let s = data();
    let cfg = StepperConfig::new(0.05, 2.0);
    let traj = evolve(&s, &cfg, &mut []).unwrap();
    let fin = &traj.final_state;
    let flow = HeatFlow::new(s);
    let d = difference_state(fin, &flow).unwrap();
    let v = heat_evolve(&flow, 2.0).unwrap();
    let du = fin.u.combine(1.0, &v.u, -1.0).unwrap().norm_sq().sqrt();
    let db = fin.b.combine(1.0, &v.b, -1.0).unwrap().norm_sq().sqrt();
    let dn = d.energy().sqrt();
    assert!(dn > 0.0);
    assert!(dn <= du + db + 1e-15);
    assert!((dn * dn - du * du - db * db).abs() <= 1e-12 * dn * dn);
}

#[test]
fn gradient_sup_norm_decays_fast_enough() {
    let grid = GridSpec::new(64, 32.0 * PI).unwrap();
    for sigma in [0.0, 1.0] {
        let flow = HeatFlow::new(make_initial_data(sigma, 0.1, 3, grid).unwrap());
        let times = log_spaced_times(2.0, 128.0, 12)[1..].to_vec();
        let g: Vec<f64> = times
            .iter()
            .map(|&t| gradient_sup_sq(&heat_evolve(&flow, t).unwrap()))
            .collect();
        let fit = fit_exponent(&times, &g, grid.default_fit_window(), false).unwrap();
        let need = 2.5 + heat_rate(sigma) - 0.3;
        assert!(fit.exponent >= need, "sigma {sigma}: exponent {} < {need}", fit.exponent);
    }
}
