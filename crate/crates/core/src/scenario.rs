//! Initial-data registry.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::ops::leray_project;
use crate::spectral::snapshot::read_snapshot;
use crate::spectral::{linf_norm, Grid, SpectralField, VectorField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Scenario {
    /// `(sin x cos y, -cos x sin y, 0)` in units of the fundamental wavenumber.
    TaylorGreen,
    /// `(sin x cos y cos z, -cos x sin y cos z, 0)`.
    TaylorGreen3d,
    /// Leray-projected Gaussian modes with `0 < |m| ≤ k_max`, rescaled so that
    /// `‖u₀‖_∞ = amplitude`.
    Random { seed: u64, k_max: f64, amplitude: f64 },
    /// `amplitude · e sin(k·x)` with `e ⊥ k`.
    SingleMode { mode: [i64; 3], amplitude: f64 },
    File { path: PathBuf },
}

impl Scenario {
    pub fn name(&self) -> String {
        match self {
            Scenario::TaylorGreen => "taylor_green".into(),
            Scenario::TaylorGreen3d => "taylor_green_3d".into(),
            Scenario::Random { seed, .. } => format!("random_{seed}"),
            Scenario::SingleMode { mode, .. } => format!("single_mode_{}_{}_{}", mode[0], mode[1], mode[2]),
            Scenario::File { path } => format!("file:{}", path.display()),
        }
    }

    /// Built-in scenarios used for calibration and regression.
    pub fn registry() -> Vec<Scenario> {
        vec![
            Scenario::TaylorGreen,
            Scenario::TaylorGreen3d,
            Scenario::Random { seed: 1, k_max: 3.0, amplitude: 1.0 },
            Scenario::Random { seed: 2, k_max: 3.0, amplitude: 1.0 },
            Scenario::SingleMode { mode: [1, 2, 0], amplitude: 1.0 },
        ]
    }
}

fn perpendicular(m: [i64; 3]) -> [f64; 3] {
    let k = [m[0] as f64, m[1] as f64, m[2] as f64];
    let pick = if k[0].abs() <= k[1].abs() && k[0].abs() <= k[2].abs() {
        [1.0, 0.0, 0.0]
    } else if k[1].abs() <= k[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let c = [k[1] * pick[2] - k[2] * pick[1], k[2] * pick[0] - k[0] * pick[2], k[0] * pick[1] - k[1] * pick[0]];
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    [c[0] / n, c[1] / n, c[2] / n]
}

pub fn generate_initial_data(scenario: &Scenario, grid: Grid) -> Result<VectorField> {
    let k0 = grid.k0();
    let u = match scenario {
        Scenario::TaylorGreen => VectorField::from_fn(grid, |x| {
            let (a, b) = (k0 * x[0], k0 * x[1]);
            [a.sin() * b.cos(), -a.cos() * b.sin(), 0.0]
        }),
        Scenario::TaylorGreen3d => VectorField::from_fn(grid, |x| {
            let (a, b, c) = (k0 * x[0], k0 * x[1], k0 * x[2]);
            [a.sin() * b.cos() * c.cos(), -a.cos() * b.sin() * c.cos(), 0.0]
        }),
        Scenario::Random { seed, k_max, amplitude } => {
            if !(*k_max >= 1.0) || !(*amplitude > 0.0) {
                return domain(format!("random scenario needs k_max ≥ 1 and amplitude > 0 (got {k_max}, {amplitude})"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut comps: [Vec<num_complex::Complex64>; 3] = Default::default();
            for c in comps.iter_mut() {
                *c = vec![num_complex::Complex64::new(0.0, 0.0); grid.spectral_len()];
            }
            for idx in 1..grid.spectral_len() {
                let m = grid.mode(idx);
                let norm = ((m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64).sqrt();
                if norm > *k_max || grid.is_nyquist(m) {
                    continue;
                }
                for c in comps.iter_mut() {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    c[idx] = num_complex::Complex64::new(re, im);
                }
            }
            // The physical round trip enforces Hermitian symmetry on the
            // self-conjugate planes.
            let raw = VectorField::from_coeffs(grid, comps)?;
            let real = VectorField::from_physical(grid, &raw.to_physical());
            let p = leray_project(&real);
            let peak = linf_norm(&p);
            if peak == 0.0 {
                return domain("random scenario produced a zero field");
            }
            p.scaled(amplitude / peak)
        }
        Scenario::SingleMode { mode, amplitude } => {
            if mode.iter().all(|&m| m == 0) {
                return domain("single mode must be nonzero");
            }
            if grid.is_nyquist(*mode) || mode.iter().any(|&m| 2 * m.unsigned_abs() as usize >= grid.n()) {
                return domain(format!("mode {mode:?} is not resolved on an n = {} grid", grid.n()));
            }
            let e = perpendicular(*mode);
            let k = [mode[0] as f64 * k0, mode[1] as f64 * k0, mode[2] as f64 * k0];
            VectorField::from_fn(grid, |x| {
                let s = amplitude * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]).sin();
                [s * e[0], s * e[1], s * e[2]]
            })
        }
        Scenario::File { path } => {
            let f = File::open(path)?;
            let u = read_snapshot(BufReader::new(f))?.into_velocity()?;
            if u.grid() != &grid {
                u.resampled(grid)?
            } else {
                u
            }
        }
    };
    Ok(u.with_time(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::divergence_defect;

    #[test]
    fn registry_fields_are_divergence_free() {
        let g = Grid::periodic_2pi(16).unwrap();
        for s in Scenario::registry() {
            let u = generate_initial_data(&s, g).unwrap();
            assert!(divergence_defect(&u) < 1e-12, "{}", s.name());
        }
    }

    #[test]
    fn random_is_seed_deterministic() {
        let g = Grid::periodic_2pi(16).unwrap();
        let s = Scenario::Random { seed: 7, k_max: 3.0, amplitude: 1.0 };
        let a = generate_initial_data(&s, g).unwrap();
        let b = generate_initial_data(&s, g).unwrap();
        assert_eq!(a, b);
        assert!((linf_norm(&a) - 1.0).abs() < 1e-12);
    }
}
