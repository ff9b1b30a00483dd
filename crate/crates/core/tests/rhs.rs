use std::f64::consts::PI;

use hallmhd::harness::acceptance::{convolution_symbols, random_state};
use hallmhd::rhs::{hall_term, rhs, symbol_bound_constant, symbol_bound_report, symbol_fields, symbol_parts, RhsOptions};
use hallmhd::spectral::{GridSpec, PhysicalField, SolenoidalState, SpectralField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(grid: GridSpec, f: impl FnMut([f64; 3]) -> [f64; 3]) -> SpectralField {
    SpectralField::from_physical(&PhysicalField::from_fn(grid, f)).unwrap()
}

/// Eighth-order central difference of periodic samples along `axis`.
fn fd(v: &[f64], n: usize, h: f64, axis: usize) -> Vec<f64> {
    const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let at = |i: usize, j: usize, l: usize| v[(i % n * n + j % n) * n + l % n];
    let mut out = vec![0.0; v.len()];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let mut d = 0.0;
                for (s, c) in C.iter().enumerate() {
                    let o = s + 1;
                    let (p, m) = match axis {
                        0 => (at(i + o, j, l), at(i + n - o, j, l)),
                        1 => (at(i, j + o, l), at(i, j + n - o, l)),
                        _ => (at(i, j, l + o), at(i, j, l + n - o)),
                    };
                    d += c * (p - m);
                }
                out[(i * n + j) * n + l] = d / h;
            }
        }
    }
    out
}

fn fd_curl(f: &[Vec<f64>; 3], n: usize, h: f64) -> [Vec<f64>; 3] {
    let d = |c: usize, a: usize| fd(&f[c], n, h, a);
    let sub = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>();
    [sub(d(2, 1), d(1, 2)), sub(d(0, 2), d(2, 0)), sub(d(1, 0), d(0, 1))]
}

#[test]
fn hall_term_matches_finite_differences() {
    let b_of = |x: [f64; 3]| [x[1].sin(), x[2].sin(), x[0].sin()];
    let fine_n = 64;
    let fine = GridSpec::new(fine_n, 2.0 * PI).unwrap();
    let h = fine.spacing();
    let bp = PhysicalField::from_fn(fine, b_of);
    let b = bp.components().clone();
    let j = fd_curl(&b, fine_n, h);
    let npts = fine.len();
    let mut jxb = [vec![0.0; npts], vec![0.0; npts], vec![0.0; npts]];
    for x in 0..npts {
        jxb[0][x] = j[1][x] * b[2][x] - j[2][x] * b[1][x];
        jxb[1][x] = j[2][x] * b[0][x] - j[0][x] * b[2][x];
        jxb[2][x] = j[0][x] * b[1][x] - j[1][x] * b[0][x];
    }
    let oracle = fd_curl(&jxb, fine_n, h);

    let grid = GridSpec::new(16, 2.0 * PI).unwrap();
    let spectral = hall_term(&field(grid, b_of)).unwrap().to_physical();
    let stride = fine_n / 16;
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for idx in 0..grid.len() {
        let (i, jj, l) = grid.unflatten(idx);
        let fidx = fine.index(i * stride, jj * stride, l * stride);
        for a in 0..3 {
            err = err.max((spectral.component(a)[idx] - oracle[a][fidx]).abs());
            scale = scale.max(oracle[a][fidx].abs());
        }
    }
    assert!(scale > 0.1, "oracle is nontrivial");
    assert!(err / scale < 1e-6, "relative error {}", err / scale);
}

#[test]
fn hall_term_vanishes_on_rotating_beltrami_field() {
    let grid = GridSpec::new(16, 2.0 * PI).unwrap();
    let b = field(grid, |x| [x[2].cos(), x[2].sin(), 0.0]);
    assert!(hall_term(&b).unwrap().max_abs_coeff() < 1e-14);
}

#[test]
fn flux_route_equals_advective_route() {
    let grid = GridSpec::new(16, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let s = random_state(grid, &mut rng).unwrap();
        let (du, db) = rhs(
            &s,
            RhsOptions {
                laplacian: false,
                nonlinear: true,
            },
        )
        .unwrap();
        let (h, m) = symbol_fields(&s).unwrap();
        assert!(h.scaled(-1.0).max_rel_diff(&du) < 1e-12);
        assert!(m.scaled(-1.0).max_rel_diff(&db) < 1e-12);
    }
}

#[test]
fn rhs_is_divergence_free() {
    let grid = GridSpec::new(16, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let s = random_state(grid, &mut rng).unwrap();
    let (du, db) = rhs(&s, RhsOptions::default()).unwrap();
    for f in [du, db] {
        assert!(f.divergence_defect() < 1e-12 * f.max_abs_coeff() * grid.k_max_retained());
    }
}

#[test]
fn hall_term_does_no_work() {
    let grid = GridSpec::new(16, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let s = random_state(grid, &mut rng).unwrap().scaled(1e-2);
    let b = &s.b;
    let work = hall_term(b).unwrap().inner(b).unwrap();
    let e = b.norm_sq();
    let h1 = (e + b.weighted_norm_sq(|i| grid.k2(i))).sqrt();
    assert!(work.abs() < 1e-10 * e * h1);
}

#[test]
fn fft_products_match_direct_convolution() {
    let grid = GridSpec::new(16, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let s = random_state(grid, &mut rng).unwrap();
    let direct = convolution_symbols(&s);
    let p = symbol_parts(&s).unwrap();
    assert!(p.h_hat.max_rel_diff(&direct[0]) < 1e-11);
    assert!(p.m_linear.max_rel_diff(&direct[1]) < 1e-11);
    assert!(p.m_hall.max_rel_diff(&direct[2]) < 1e-11);
}

#[test]
fn two_mode_state_matches_convolution() {
    let grid = GridSpec::new(16, 2.0 * PI).unwrap();
    let u = field(grid, |x| [0.0, x[0].sin(), 0.4 * x[1].cos()]);
    let b = field(grid, |x| [x[1].sin(), 0.7 * x[2].sin(), x[0].cos()]);
    let s = SolenoidalState::new(u, b, 0.0).unwrap();
    let direct = convolution_symbols(&s);
    let p = symbol_parts(&s).unwrap();
    assert!(p.m_hall.max_abs_coeff() > 0.1);
    assert!(p.h_hat.max_rel_diff(&direct[0]) < 1e-12);
    assert!(p.m_linear.max_rel_diff(&direct[1]) < 1e-12);
    assert!(p.m_hall.max_rel_diff(&direct[2]) < 1e-12);
    let r = symbol_bound_report(&s).unwrap();
    assert!(r.ratio_h.max(r.ratio_m_linear).max(r.ratio_m_quadratic) <= 1.0 / grid.volume());
}

#[test]
fn symbol_ratios_are_bounded_and_scale_invariant() {
    let grid = GridSpec::new(16, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let c = symbol_bound_constant(&grid);
    for _ in 0..10 {
        let s = random_state(grid, &mut rng).unwrap();
        let r = symbol_bound_report(&s).unwrap();
        assert!(r.ratio_h <= c && r.ratio_m_linear <= c && r.ratio_m_quadratic <= c);
        let r2 = symbol_bound_report(&s.scaled(3.7)).unwrap();
        assert!((r.ratio_h - r2.ratio_h).abs() <= 1e-12 * r.ratio_h);
        assert!((r.ratio_m_linear - r2.ratio_m_linear).abs() <= 1e-12 * r.ratio_m_linear);
        assert!((r.ratio_m_quadratic - r2.ratio_m_quadratic).abs() <= 1e-12 * r.ratio_m_quadratic);
    }
}

#[test]
fn zero_state_has_zero_ratios() {
    let grid = GridSpec::new(8, 1.0).unwrap();
    let r = symbol_bound_report(&SolenoidalState::zeros(grid)).unwrap();
    assert_eq!((r.ratio_h, r.ratio_m_linear, r.ratio_m_quadratic), (0.0, 0.0, 0.0));
}
