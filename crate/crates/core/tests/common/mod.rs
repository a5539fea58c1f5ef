#![allow(dead_code)]

use nscert::spectral::{Grid, ScalarField, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sum of `count` random Fourier modes with integer wavenumbers `|m_i| ≤ kmax`,
/// evaluated pointwise.
pub fn random_modes(seed: u64, count: usize, kmax: i64) -> Vec<([i64; 3], [f64; 3], [f64; 3])> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let m = [r.random_range(-kmax..=kmax), r.random_range(-kmax..=kmax), r.random_range(-kmax..=kmax)];
            let a = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
            let b = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
            (m, a, b)
        })
        .collect()
}

pub fn eval_modes(modes: &[([i64; 3], [f64; 3], [f64; 3])], k0: f64, x: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (m, a, b) in modes {
        let ph = k0 * (m[0] as f64 * x[0] + m[1] as f64 * x[1] + m[2] as f64 * x[2]);
        for c in 0..3 {
            out[c] += a[c] * ph.cos() + b[c] * ph.sin();
        }
    }
    out
}

pub fn random_vector(grid: Grid, seed: u64, count: usize, kmax: i64) -> VectorField {
    let modes = random_modes(seed, count, kmax);
    let k0 = grid.k0();
    VectorField::from_fn(grid, |x| eval_modes(&modes, k0, x))
}

pub fn random_scalar(grid: Grid, seed: u64, count: usize, kmax: i64) -> ScalarField {
    let modes = random_modes(seed, count, kmax);
    let k0 = grid.k0();
    ScalarField::from_fn(grid, |x| eval_modes(&modes, k0, x)[0])
}

pub fn taylor_green(grid: Grid) -> VectorField {
    VectorField::from_fn(grid, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0])
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
