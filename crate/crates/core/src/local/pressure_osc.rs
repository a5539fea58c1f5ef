use serde::{Deserialize, Serialize};

use super::bump::BumpFunction;
use super::window::{point_of, CenterSet, IntervalIntegrals, OffsetStencil};
use crate::error::{domain, Result};
use crate::spectral::ops::{divergence, inverse_laplacian};
use crate::spectral::{Grid, ScalarField, SpectralField, Stencil, VectorField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureOscillation {
    /// `sup_y ∫_a^b ∫ |q - q̄(y, s)|^{3/2} φ_{r,y}`.
    pub value: f64,
    pub y_max: [f64; 3],
    /// `(s, q̄(y_max, s))` at every sample.
    pub q_bar: Vec<(f64, f64)>,
}

/// Stencils needed to evaluate the oscillation density at grid centres.
#[derive(Debug, Clone)]
pub(crate) struct OscillationKernel {
    bump: OffsetStencil,
    ball2r: OffsetStencil,
    ball_measure: f64,
}

impl OscillationKernel {
    pub fn new(grid: &Grid, r: f64) -> Result<Self> {
        let bump = BumpFunction::new(r, [0.0; 3], grid)?;
        let ball = Stencil::ball(grid, [0.0; 3], 2.0 * r, 4)?;
        Ok(Self {
            bump: OffsetStencil::from_origin(grid, &bump.value_stencil(grid)),
            ball_measure: ball.measure(),
            ball2r: OffsetStencil::from_origin(grid, &ball),
        })
    }

    /// `q̄(y) = q(y) - p₄(y) + [p₄]_{B_{2r}(y)}`.
    pub fn q_bar(&self, q: &[f64], p4: Option<&[f64]>, center: usize) -> f64 {
        match p4 {
            None => q[center],
            Some(p4) => q[center] - p4[center] + self.ball2r.apply_at(center, |i| p4[i]) / self.ball_measure,
        }
    }

    /// `∫ |q - q̄(y)|^{3/2} φ_{r,y}` for every centre.
    pub fn densities(&self, q: &[f64], p4: Option<&[f64]>, centers: &[usize]) -> Vec<f64> {
        centers
            .iter()
            .map(|&c| {
                let qb = self.q_bar(q, p4, c);
                self.bump.apply_at(c, |i| (q[i] - qb).abs().powf(1.5))
            })
            .collect()
    }
}

/// Physical samples of the `Δ⁻¹ div f` part of the pressure.
pub(crate) fn forcing_pressure(f: &VectorField) -> Vec<f64> {
    inverse_laplacian(&divergence(f)).to_physical()
}

/// Oscillation of the sampled pressure `q` around `q̄` over `(a, b)`.
/// `samples` holds `(s, q(s), f(s))`; without forcing `q̄(y, s) = q(y, s)`.
pub fn pressure_oscillation(
    samples: &[(f64, ScalarField, Option<VectorField>)],
    r: f64,
    centers: &CenterSet,
    interval: (f64, f64),
) -> Result<PressureOscillation> {
    let Some((_, q0, _)) = samples.first() else {
        return domain("no pressure samples");
    };
    let grid = *q0.grid();
    let kernel = OscillationKernel::new(&grid, r)?;
    let idx = centers.indices(&grid)?;
    let tol = 1e-9 * (interval.1 - interval.0).abs().max(1e-300);
    let mut integ = IntervalIntegrals::new(1, idx.len(), vec![interval], tol);
    let mut qbars = Vec::new();
    for (t, q, f) in samples {
        if *t < interval.0 - tol || *t > interval.1 + tol {
            continue;
        }
        let qp = q.to_physical();
        let p4 = f.as_ref().map(forcing_pressure);
        let dens = kernel.densities(&qp, p4.as_deref(), &idx);
        qbars.push((*t, idx.iter().map(|&c| kernel.q_bar(&qp, p4.as_deref(), c)).collect::<Vec<f64>>()));
        integ.push(*t, vec![dens])?;
    }
    let vals = integ.finish()?.remove(0).remove(0);
    let (arg, value) = vals.iter().enumerate().fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let c = idx[arg];
    let q_bar = qbars.iter().map(|(t, qb)| (*t, qb[arg])).collect();
    Ok(PressureOscillation { value, y_max: point_of(&grid, c), q_bar })
}
