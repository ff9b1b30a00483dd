use std::f64::consts::PI;

use hallmhd::decay::init::make_initial_data;
use hallmhd::gevrey::{
    gevrey_log_norm, gevrey_norm, gevrey_record, interpolation_check, interpolation_modewise, radius_estimate, tau_schedule,
    third_constant, track_gevrey, GevreyParams,
};
use hallmhd::harness::acceptance::random_solenoidal;
use hallmhd::heat::{heat_evolve, HeatFlow};
use hallmhd::spectral::{lambda_pow, GridSpec, SpectralField};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_field(seed: u64) -> SpectralField {
    let grid = GridSpec::new(16, 2.0 * PI).unwrap();
    random_solenoidal(grid, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn zero_radius_is_sobolev_seminorm() {
    let f = random_field(31);
    for r in [0.5, 1.0, 2.75] {
        let direct = lambda_pow(&f, r).unwrap().norm_sq();
        assert!((gevrey_norm(&f, r, 0.0).unwrap() - direct).abs() <= 1e-12 * direct);
    }
}

#[test]
fn monotone_in_radius_and_index() {
    let f = random_field(32);
    let taus = [0.0, 0.1, 0.3, 0.6];
    let rs = [0.0, 0.5, 1.5, 2.75];
    for &r in &rs {
        let v: Vec<f64> = taus.iter().map(|&t| gevrey_norm(&f, r, t).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] >= w[0]));
    }
    for &t in &taus {
        let v: Vec<f64> = rs.iter().map(|&r| gevrey_norm(&f, r, t).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn single_mode_value() {
    let grid = GridSpec::new(8, 2.0 * PI).unwrap();
    let a = 0.3;
    let mut f = SpectralField::zeros(grid);
    let z = Complex64::default();
    f.set(grid.index_of_mode([1, 0, 0]), [z, Complex64::new(a, 0.0), z]);
    f.set(grid.index_of_mode([-1, 0, 0]), [z, Complex64::new(a, 0.0), z]);
    let want = grid.volume() * 2.0 * a * a * 1f64.exp();
    assert!((gevrey_norm(&f, 2.0, 0.5).unwrap() - want).abs() < 1e-13 * want);
}

#[test]
fn log_norm_survives_overflow() {
    let f = random_field(33);
    let ln = gevrey_log_norm(&f, 2.0, 200.0).unwrap();
    assert!(ln.is_finite() && ln > 700.0);
    assert!(gevrey_norm(&f, 2.0, 200.0).is_err());
}

#[test]
fn first_inequality_on_random_fields() {
    for seed in 0..100 {
        let f = random_field(100 + seed);
        let rep = interpolation_check(&f, 2.75, 1.375, 0.4).unwrap();
        assert!(rep.first.holds(), "seed {seed}: {:?}", rep.first);
        assert!(!rep.violated());
    }
}

#[test]
fn modewise_inequalities_hold() {
    for i in 0..400 {
        let rho = 1e-3 * 1.03f64.powi(i);
        for &tau in &[0.05, 0.5, 2.0] {
            for &(p, q) in &[(0.0, 0.0), (1.0, 0.5), (2.75, 1.375), (2.0, 3.0)] {
                let m = interpolation_modewise(rho, p, q, tau);
                assert!(m[0] <= 1.0 + 1e-12 && m[1] <= 1.0 + 1e-12);
                if 2.0 * q >= p {
                    assert!(m[2] <= third_constant(p, q) * (1.0 + 1e-12));
                }
            }
        }
    }
}

#[test]
fn schedule_side_condition() {
    let p = GevreyParams::default();
    for i in 0..50 {
        let t = 0.37 * i as f64;
        let tau = tau_schedule(t, &p);
        let h = 1e-6;
        let deriv = (tau_schedule(t + h, &p) - tau_schedule((t - h).max(0.0), &p)) / (t + h - (t - h).max(0.0));
        assert!((tau * deriv - p.alpha_tau / 2.0).abs() < 1e-6);
        assert!(tau * deriv <= 0.25 + 1e-6);
        // with α = τ₀²: (1+t)^{−1/2} = τ₀/τ
        assert!(((1.0 + t).powf(-0.5) - p.tau0 / tau).abs() < 1e-14);
    }
}

#[test]
fn heat_only_trajectory_stays_finite() {
    let grid = GridSpec::new(32, 16.0 * PI).unwrap();
    let flow = HeatFlow::new(make_initial_data(0.0, 0.1, 9, grid).unwrap());
    let params = GevreyParams::default();
    let states: Vec<_> = [0.0, 1.0, 4.0, 16.0, 64.0]
        .iter()
        .map(|&t| heat_evolve(&flow, t).unwrap())
        .collect();
    let recs = track_gevrey(&states, &params, Some(1.5)).unwrap();
    for r in &recs {
        assert!(r.m_r.is_finite() && r.ratio.unwrap().is_finite());
        assert!(r.g_r >= r.j_r && r.k_r >= r.h_r);
    }
    assert_eq!(gevrey_record(&states[2], &params).unwrap().m_r, recs[2].m_r);
}

#[test]
fn tail_slope_recovers_exponential_decay() {
    let grid = GridSpec::new(64, 2.0 * PI).unwrap();
    let f = SpectralField::from_fn(grid, |idx, k| {
        if !grid.retained(idx) || grid.k2(idx) == 0.0 {
            return [Complex64::default(); 3];
        }
        let a = (-0.7 * grid.k2(idx).sqrt()).exp();
        // unit vector orthogonal to k
        let n = if k[0].abs() < 0.5 * grid.k2(idx).sqrt() {
            [0.0, -k[2], k[1]]
        } else {
            [-k[1], k[0], 0.0]
        };
        let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        [0, 1, 2].map(|i| Complex64::new(a * n[i] / nn, 0.0))
    });
    let est = radius_estimate(&f).unwrap();
    assert!((est.tau_est - 0.7).abs() < 0.02, "tau_est {}", est.tau_est);
}
