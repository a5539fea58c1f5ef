mod common;

use common::*;
use nscert::solver::{pressure_from_velocity, pressure_residual};
use nscert::spectral::ops::{divergence, laplacian, riesz_symbol};
use nscert::spectral::{
    heat_propagate, l2_norm, leray_project, linf_norm, riesz_tensor, Grid, ScalarField, VectorField,
};
use num_complex::Complex64;
use rand::Rng;

#[test]
fn heat_matches_exponential_on_random_modes() {
    let grid = Grid::periodic_2pi(16).unwrap();
    let mut r = rng(11);
    for _ in 0..100 {
        let m = [r.random_range(-7..=7i64), r.random_range(-7..=7i64), r.random_range(0..=7i64)];
        let t = r.random_range(0.0..0.3);
        let amp = Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let Some((idx, _)) = grid.index_of(m) else { continue };
        let mut c = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
        c[idx] = amp;
        let s = ScalarField::from_coeffs(grid, c).unwrap();
        let out = heat_propagate(&s, t).unwrap();
        let k2 = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
        let want = amp * (-k2 * t).exp();
        assert!((out.coeffs()[idx] - want).norm() <= 1e-12, "mode {m:?}");
    }
}

#[test]
fn heat_is_a_semigroup() {
    let grid = Grid::periodic_2pi(16).unwrap();
    let w = random_vector(grid, 3, 6, 5);
    let a = heat_propagate(&heat_propagate(&w, 0.07).unwrap(), 0.05).unwrap();
    let b = heat_propagate(&w, 0.12).unwrap();
    assert!(linf_norm(&a.sub(&b).unwrap()) <= 1e-12 * linf_norm(&w).max(1.0));
}

#[test]
fn leray_is_idempotent_and_divergence_free() {
    let grid = Grid::periodic_2pi(16).unwrap();
    for seed in 0..5 {
        let w = random_vector(grid, seed, 8, 5);
        let p = leray_project(&w);
        let pp = leray_project(&p);
        assert!(l2_norm(&pp.sub(&p).unwrap()) <= 1e-12 * l2_norm(&w));
        // k·û computed from integer modes, independently of the operator code.
        let k0 = grid.k0();
        let mut worst: f64 = 0.0;
        for idx in 0..grid.spectral_len() {
            let m = grid.mode(idx);
            let d: Complex64 = (0..3).map(|c| p.comps()[c][idx] * (m[c] as f64 * k0)).sum();
            worst = worst.max(d.norm());
        }
        assert!(worst <= 1e-12 * l2_norm(&w));
    }
}

#[test]
fn leray_keeps_only_solenoidal_part_of_sum() {
    let grid = Grid::periodic_2pi(16).unwrap();
    let w = VectorField::from_fn(grid, |x| [x[0].sin() + x[1].sin(), 0.0, 0.0]);
    let want = VectorField::from_fn(grid, |x| [x[1].sin(), 0.0, 0.0]);
    assert!(linf_norm(&leray_project(&w).sub(&want).unwrap()) < 1e-13);
}

#[test]
fn parseval_matches_physical_quadrature() {
    let grid = Grid::new(16, 3.0).unwrap();
    let w = random_vector(grid, 9, 10, 5);
    let phys = w.to_physical();
    let sum: f64 = (0..grid.physical_len()).map(|p| (0..3).map(|c| phys[c][p] * phys[c][p]).sum::<f64>()).sum();
    let direct = (sum * grid.cell_volume()).sqrt();
    assert!((l2_norm(&w) - direct).abs() <= 1e-10 * direct);
}

#[test]
fn sine_norm_closed_forms() {
    let grid = Grid::periodic_2pi(16).unwrap();
    let w = VectorField::from_fn(grid, |x| [x[0].sin(), 0.0, 0.0]);
    let pi = std::f64::consts::PI;
    assert!((l2_norm(&w) - (2.0 * pi).powf(1.5) / 2f64.sqrt()).abs() < 1e-10);
    assert!((linf_norm(&w) - 1.0).abs() < 1e-6);
}

#[test]
fn riesz_symbol_identity_and_trace() {
    let grid = Grid::periodic_2pi(12).unwrap();
    for idx in 1..grid.spectral_len() {
        let k = grid.wavevector(idx);
        for j in 0..3 {
            let s: f64 = (0..3).map(|i| k[i] * riesz_symbol(&grid, idx, i, j)).sum();
            assert!((s - k[j]).abs() <= 1e-12 * (1.0 + k[j].abs()));
        }
    }
    let f = random_scalar(grid, 5, 6, 4);
    let trace = riesz_tensor(&f, 0, 0).add(&riesz_tensor(&f, 1, 1)).unwrap().add(&riesz_tensor(&f, 2, 2)).unwrap();
    let mean_free = f.add(&ScalarField::from_fn(grid, |_| -f.mean())).unwrap();
    assert!(max_abs_diff(&trace.to_physical(), &mean_free.to_physical()) < 1e-12);
}

#[test]
fn riesz_examples() {
    let grid = Grid::periodic_2pi(16).unwrap();
    let c2x = ScalarField::from_fn(grid, |x| (2.0 * x[0]).cos());
    assert!(max_abs_diff(&riesz_tensor(&c2x, 0, 0).to_physical(), &c2x.to_physical()) < 1e-13);
    let c2y = ScalarField::from_fn(grid, |x| (2.0 * x[1]).cos());
    assert!(linf_norm(&riesz_tensor(&c2y, 0, 0)) < 1e-14);
}

#[test]
fn pressure_residual_small_on_random_fields() {
    let n = 32;
    let start = std::time::Instant::now();
    let grid = Grid::periodic_2pi(n).unwrap();
    for seed in 0..3 {
        let u = leray_project(&random_vector(grid, 100 + seed, 6, 4));
        let p = pressure_from_velocity(&u, None, None, None).unwrap();
        let res = pressure_residual(&p, &u, None, None, None).unwrap();
        let scale = l2_norm(&laplacian(&p)).max(1.0);
        assert!(res <= 1e-10 * scale, "residual {res:e} scale {scale:e}");
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn taylor_green_pressure_balances_momentum() {
    let grid = Grid::periodic_2pi(16).unwrap();
    let u = taylor_green(grid);
    let p = pressure_from_velocity(&u, None, None, None).unwrap();
    let want = ScalarField::from_fn(grid, |x| 0.25 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()));
    assert!(max_abs_diff(&p.to_physical(), &want.to_physical()) < 1e-13);
    assert!(linf_norm(&divergence(&u)) < 1e-13);
}
