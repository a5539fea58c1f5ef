//! Leray mollification and smooth spectral truncation, with the error
//! tensors that recast each regularized system as Navier–Stokes with a
//! divergence-form source.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::ops::{self, outer};
use crate::spectral::{Grid, SpectralField, TensorField, VectorField};

/// `exp(-1/(1-s²))` on `|s| < 1`.
pub fn bump_profile(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

fn step_kernel(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, strictly increasing between.
pub fn smoothstep(x: f64) -> f64 {
    let a = step_kernel(x);
    let b = step_kernel(1.0 - x);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Radial cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`.
pub fn cutoff_profile(s: f64) -> f64 {
    smoothstep(2.0 - s)
}

const RADIAL_NODES: usize = 2048;

/// Normalized transform of the unit bump on `B_R`: `ζ̂(k)/ζ̂(0)` by
/// composite Simpson quadrature of the radial Hankel integral.
fn bump_transform(k: f64, radius: f64) -> f64 {
    let h = radius / RADIAL_NODES as f64;
    let simpson = |f: &dyn Fn(f64) -> f64| {
        let mut acc = f(0.0) + f(radius);
        for i in 1..RADIAL_NODES {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        acc * h / 3.0
    };
    let mass = simpson(&|r| bump_profile(r / radius) * r * r);
    if k == 0.0 {
        return 1.0;
    }
    let kr = |r: f64| {
        let x = k * r;
        // sin(x)/x with the series near zero
        if x.abs() < 1e-4 {
            1.0 - x * x / 6.0
        } else {
            x.sin() / x
        }
    };
    simpson(&|r| bump_profile(r / radius) * r * r * kr(r)) / mass
}

/// Mollifier `η_ε = ζ_{ε/2} * ζ_{ε/2}` (self-convolution of the unit-mass
/// bump on `B_{ε/2}`), so `supp η_ε ⊂ B_ε` and `η̂ = ζ̂² ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mollifier {
    epsilon: f64,
    grid: Grid,
    multiplier: Vec<f64>,
}

impl Mollifier {
    pub fn new(grid: Grid, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return domain(format!("mollifier epsilon {epsilon} must be positive"));
        }
        let mut cache: HashMap<i64, f64> = HashMap::new();
        let k0 = grid.k0();
        let multiplier = (0..grid.spectral_len())
            .map(|idx| {
                let m = grid.mode(idx);
                let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
                *cache.entry(m2).or_insert_with(|| {
                    let z = bump_transform(k0 * (m2 as f64).sqrt(), 0.5 * epsilon);
                    z * z
                })
            })
            .collect();
        Ok(Self { epsilon, grid, multiplier })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    /// Distinct `(|k|, η̂(k))` pairs sorted by `|k|`.
    pub fn table(&self) -> Vec<(f64, f64)> {
        radial_table(&self.grid, &self.multiplier)
    }
}

/// Smooth spectral projection `P_ε` with symbol `ψ(ε|k|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCutoff {
    epsilon: f64,
    grid: Grid,
    multiplier: Vec<f64>,
}

impl SpectralCutoff {
    pub fn new(grid: Grid, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return domain(format!("cutoff epsilon {epsilon} must be positive"));
        }
        let multiplier = (0..grid.spectral_len())
            .map(|idx| cutoff_profile(epsilon * grid.k_squared(idx).sqrt()))
            .collect();
        Ok(Self { epsilon, grid, multiplier })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    pub fn table(&self) -> Vec<(f64, f64)> {
        radial_table(&self.grid, &self.multiplier)
    }
}

fn radial_table(grid: &Grid, mult: &[f64]) -> Vec<(f64, f64)> {
    let mut seen: HashMap<i64, f64> = HashMap::new();
    for (idx, &v) in mult.iter().enumerate() {
        let m = grid.mode(idx);
        seen.entry(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).or_insert(v);
    }
    let mut rows: Vec<(f64, f64)> =
        seen.into_iter().map(|(m2, v)| (grid.k0() * (m2 as f64).sqrt(), v)).collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    rows
}

fn apply_table<F: SpectralField>(w: &F, grid: &Grid, table: &[f64]) -> Result<F> {
    w.grid().check_same(grid)?;
    Ok(w.with_multiplier(|idx| table[idx]))
}

/// `u * η_ε`.
pub fn mollify(u: &VectorField, m: &Mollifier) -> Result<VectorField> {
    apply_table(u, &m.grid, &m.multiplier)
}

/// `P_ε w`.
pub fn spectral_cutoff<F: SpectralField>(w: &F, c: &SpectralCutoff) -> Result<F> {
    apply_table(w, &c.grid, &c.multiplier)
}

/// Leray error tensor, entry `(i, j) = u_i (u - u*η)_j`, so that
/// `∂_j g_{ij} = ((u - u*η)·∇) u_i` for divergence-free `u`.
pub fn error_tensor_leray(u: &VectorField, m: &Mollifier) -> Result<TensorField> {
    let diff = u.sub(&mollify(u, m)?)?;
    outer(u, &diff)
}

/// `(Id - P_ε)(u ⊗ u)`.
pub fn error_tensor_projection(u: &VectorField, c: &SpectralCutoff) -> Result<TensorField> {
    u.grid().check_same(&c.grid)?;
    let uu = outer(u, u)?;
    Ok(uu.with_multiplier(|idx| 1.0 - c.multiplier[idx]))
}

/// Configured regularization kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularizationKind {
    None,
    Leray { epsilon: f64 },
    Projection { epsilon: f64 },
}

impl RegularizationKind {
    pub fn epsilon(&self) -> f64 {
        match *self {
            RegularizationKind::None => 0.0,
            RegularizationKind::Leray { epsilon } | RegularizationKind::Projection { epsilon } => epsilon,
        }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        match self {
            RegularizationKind::None => RegularizationKind::None,
            RegularizationKind::Leray { .. } => RegularizationKind::Leray { epsilon },
            RegularizationKind::Projection { .. } => RegularizationKind::Projection { epsilon },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegularizationKind::None => "none",
            RegularizationKind::Leray { .. } => "leray",
            RegularizationKind::Projection { .. } => "projection",
        }
    }
}

/// A regularization instantiated on a grid.
#[derive(Debug, Clone)]
pub enum Regularization {
    None,
    Leray(Mollifier),
    Projection(SpectralCutoff),
}

impl Regularization {
    pub fn build(grid: Grid, kind: RegularizationKind) -> Result<Self> {
        Ok(match kind {
            RegularizationKind::None => Regularization::None,
            RegularizationKind::Leray { epsilon } => Regularization::Leray(Mollifier::new(grid, epsilon)?),
            RegularizationKind::Projection { epsilon } => {
                Regularization::Projection(SpectralCutoff::new(grid, epsilon)?)
            }
        })
    }

    pub fn kind(&self) -> RegularizationKind {
        match self {
            Regularization::None => RegularizationKind::None,
            Regularization::Leray(m) => RegularizationKind::Leray { epsilon: m.epsilon },
            Regularization::Projection(c) => RegularizationKind::Projection { epsilon: c.epsilon },
        }
    }

    /// `g_ε` evaluated at the state `u_ε`; zero without regularization.
    pub fn error_tensor(&self, u: &VectorField) -> Result<TensorField> {
        match self {
            Regularization::None => Ok(TensorField::zeros(*u.grid())),
            Regularization::Leray(m) => error_tensor_leray(u, m),
            Regularization::Projection(c) => error_tensor_projection(u, c),
        }
    }

    /// Regularized nonlinearity `-ℙ[u·∇u]_reg` in divergence form.
    pub fn nonlinearity(&self, u: &VectorField) -> Result<VectorField> {
        let flux = match self {
            Regularization::None => outer(u, u)?,
            Regularization::Leray(m) => outer(u, &mollify(u, m)?)?,
            Regularization::Projection(c) => spectral_cutoff(&outer(u, u)?, c)?,
        };
        Ok(ops::projected_divergence(&flux).scaled(-1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::linf_norm;

    #[test]
    fn mollifier_multiplier_bounds() {
        let g = Grid::periodic_2pi(16).unwrap();
        let m = Mollifier::new(g, 0.8).unwrap();
        assert_eq!(m.multiplier()[0], 1.0);
        assert!(m.multiplier().iter().all(|&x| (0.0..=1.0).contains(&x)));
        let tiny = Mollifier::new(g, 1e-8).unwrap();
        assert!(tiny.multiplier().iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert!(Mollifier::new(g, 0.0).is_err());
    }

    #[test]
    fn bump_transform_matches_cartesian_sum() {
        // Direct 3D quadrature of the bump transform along one axis.
        let radius = 0.5;
        let k = 3.0;
        let n = 80;
        let h = 2.0 * radius / n as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let p = |i: usize| -radius + (i as f64 + 0.5) * h;
                    let (x, y, z) = (p(a), p(b), p(c));
                    let w = bump_profile((x * x + y * y + z * z).sqrt() / radius);
                    num += w * (k * x).cos();
                    den += w;
                }
            }
        }
        assert!((bump_transform(k, radius) - num / den).abs() < 1e-6);
    }

    #[test]
    fn cutoff_plateau_and_support() {
        assert_eq!(cutoff_profile(0.3), 1.0);
        assert_eq!(cutoff_profile(1.0), 1.0);
        assert_eq!(cutoff_profile(2.0), 0.0);
        let mut last = 1.0;
        for i in 0..=100 {
            let v = cutoff_profile(1.0 + i as f64 / 100.0);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn mollification_error_bound_on_sine() {
        let g = Grid::periodic_2pi(32).unwrap();
        let u = VectorField::from_fn(g, |x| [x[0].sin(), 0.0, 0.0]);
        let m = Mollifier::new(g, 0.1).unwrap();
        let err = linf_norm(&u.sub(&mollify(&u, &m).unwrap()).unwrap());
        assert!(err <= 0.1, "{err}");
        assert!(err > 0.0);
    }
}
