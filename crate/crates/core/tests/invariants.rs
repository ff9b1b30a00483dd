use std::f64::consts::PI;

use hallmhd::decay::exponents::{bootstrap_exponent, diff_decay_exponent};
use hallmhd::decay::fit::fit_exponent;
use hallmhd::gevrey::{gevrey_norm, interpolation_modewise, third_constant};
use hallmhd::harness::acceptance::{random_solenoidal, random_state};
use hallmhd::harness::{ExperimentConfig, Profile};
use hallmhd::heat::{heat_evolve, HeatFlow};
use hallmhd::rhs::{rhs, RhsOptions};
use hallmhd::spectral::snapshot::{load_state, save_state, Precision};
use hallmhd::spectral::{dealias, divergence, leray_project, GridSpec, SolenoidalState, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Arbitrary (not solenoidal, not dealiased) field with Hermitian symmetry.
fn raw_field(grid: GridSpec, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phys = hallmhd::spectral::PhysicalField::from_fn(grid, |_| {
        [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
    });
    SpectralField::from_physical(&phys).unwrap()
}

fn grid_strategy() -> impl Strategy<Value = GridSpec> {
    (prop::sample::select(vec![8usize, 12, 16]), 0.5f64..50.0).prop_map(|(n, l)| GridSpec::new(n, l).unwrap())
}

fn state(grid: GridSpec, seed: u64) -> SolenoidalState {
    random_state(grid, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leray_is_an_idempotent_projection(grid in grid_strategy(), seed in any::<u64>()) {
        let f = raw_field(grid, seed);
        let p = leray_project(&f);
        let scale = f.max_abs_coeff();
        prop_assert!(leray_project(&p).max_rel_diff(&p) < 1e-14);
        prop_assert!(divergence(&p).max_abs_coeff() <= 1e-13 * scale * grid.k_max_retained().max(1.0));
        prop_assert!(p.norm_sq() <= f.norm_sq() * (1.0 + 1e-14));
    }

    #[test]
    fn dealias_is_idempotent(grid in grid_strategy(), seed in any::<u64>()) {
        let f = raw_field(grid, seed);
        let d = dealias(&f);
        prop_assert_eq!(dealias(&d), d.clone());
        prop_assert!(d.norm_sq() <= f.norm_sq());
    }

    #[test]
    fn heat_flow_is_a_contracting_semigroup(
        grid in grid_strategy(), seed in any::<u64>(), s in 0.0f64..3.0, t in 0.0f64..3.0,
    ) {
        let flow = HeatFlow::new(state(grid, seed));
        let direct = heat_evolve(&flow, s + t).unwrap();
        let mid = heat_evolve(&flow, s).unwrap();
        let two = heat_evolve(&HeatFlow::new(mid.clone()), t).unwrap();
        prop_assert!(direct.u.max_rel_diff(&two.u) < 1e-12 && direct.b.max_rel_diff(&two.b) < 1e-12);
        prop_assert!(direct.energy() <= mid.energy());
        prop_assert!(mid.energy() <= flow.initial().energy());
    }

    #[test]
    fn gevrey_norm_is_monotone(
        seed in any::<u64>(), r in 0.0f64..4.0, dr in 0.0f64..2.0, tau in 0.0f64..1.0, dtau in 0.0f64..1.0,
    ) {
        let grid = GridSpec::new(12, 2.0 * PI).unwrap();
        let f = random_solenoidal(grid, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let base = gevrey_norm(&f, r, tau).unwrap();
        prop_assert!(gevrey_norm(&f, r, tau + dtau).unwrap() >= base);
        prop_assert!(gevrey_norm(&f, r + dr, tau).unwrap() >= base * (1.0 - 1e-14));
    }

    #[test]
    fn interpolation_inequalities_hold_modewise(
        rho in 1e-4f64..1e3, tau in 1e-3f64..10.0, p in 0.0f64..5.0, q in 0.0f64..5.0,
    ) {
        let m = interpolation_modewise(rho, p, q, tau);
        prop_assert!(m[0] <= 1.0 + 1e-12);
        prop_assert!(m[1] <= 1.0 + 1e-12);
        if 2.0 * q >= p {
            prop_assert!(m[2] <= third_constant(p, q) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bootstrap_reaches_the_capped_rate(alpha in 0.0f64..20.0) {
        let b = bootstrap_exponent(alpha).unwrap();
        prop_assert!(b.trace.len() <= 4);
        prop_assert_eq!(b.trace[0], 0.0);
        prop_assert!(b.trace.windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(b.exponent, alpha.min(2.5));
    }

    #[test]
    fn difference_exponent_is_continuous(alpha in 0.0f64..2.5) {
        let (p, _) = diff_decay_exponent(alpha).unwrap();
        let (q, _) = diff_decay_exponent((alpha + 1e-9).min(2.5)).unwrap();
        prop_assert!((p - q).abs() <= 3e-9);
        prop_assert!(p >= 0.5 && p <= 2.5);
    }

    #[test]
    fn exact_power_laws_are_recovered(a in 0.01f64..100.0, p in 0.1f64..5.0) {
        let t: Vec<f64> = (0..30).map(|i| 0.7 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|&s| a * (s + 1.0).powf(-p)).collect();
        let fit = fit_exponent(&t, &y, (1.0, 30.0), false).unwrap();
        prop_assert!((fit.exponent - p).abs() < 1e-9);
        prop_assert!((fit.prefactor - a).abs() < 1e-8 * a);
    }

    #[test]
    fn config_json_roundtrip(seed in any::<u64>(), sigma in 0.0f64..2.0, amp in 1e-3f64..1.0, smoke in any::<bool>()) {
        let mut cfg = ExperimentConfig::profile(if smoke { Profile::Smoke } else { Profile::Desk }, "out");
        cfg.init.seed = seed;
        cfg.init.sigma = sigma;
        cfg.init.amplitude = amp;
        let back: ExperimentConfig = serde_json::from_str(&cfg.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash().unwrap(), cfg.hash().unwrap());
    }

    #[test]
    fn snapshot_roundtrip_is_exact(grid in grid_strategy(), seed in any::<u64>(), t in 0.0f64..1e3) {
        let dir = tempfile::tempdir().unwrap();
        let mut s = state(grid, seed);
        s.time = t;
        let path = dir.path().join("s.hmsf");
        save_state(&path, &s, Precision::Double).unwrap();
        prop_assert_eq!(load_state(&path).unwrap(), s);
    }

    #[test]
    fn rhs_preserves_hermitian_symmetry(grid in grid_strategy(), seed in any::<u64>()) {
        let s = state(grid, seed);
        let (du, db) = rhs(&s, RhsOptions::default()).unwrap();
        let scale = du.max_abs_coeff().max(db.max_abs_coeff());
        prop_assert!(du.hermitian_defect() <= 1e-14 * scale);
        prop_assert!(db.hermitian_defect() <= 1e-14 * scale);
        prop_assert!((du.component(0)[0] - Complex64::default()).norm() <= 1e-14 * scale);
    }
}
