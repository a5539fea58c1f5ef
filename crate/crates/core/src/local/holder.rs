use serde::{Deserialize, Serialize};

use super::eps_reg::ParabolicCylinder;
use super::exponents::LocalExponents;
use crate::error::{domain, Result};
use crate::spectral::quadrature::for_points_near;
use crate::spectral::{SpectralField, VectorField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub alpha_h: f64,
    /// `max |u(z) - u(z')| / d(z, z')^{α}` over sampled pairs in `Q_{r/2,θ}`.
    pub seminorm: f64,
    /// `C̄/(θ r^{1+α})`, reported for audit.
    pub bound: f64,
    pub points: usize,
}

const MAX_POINTS: usize = 1500;

/// Discrete parabolic Hölder seminorm with distance
/// `d = (|x - x'|² + |t - t'|)^{1/2}` on the half cylinder `Q_{r/2,θ}(z₀)`.
pub fn holder_seminorm_estimate(
    samples: &[(f64, VectorField)],
    cylinder: &ParabolicCylinder,
    alpha_h: f64,
    exponents: &LocalExponents,
    c_bar: f64,
) -> Result<HolderEstimate> {
    let limit = exponents.holder_limit();
    if !(alpha_h > 0.0 && alpha_h < limit) {
        return domain(format!("Hölder exponent {alpha_h} must lie in (0, {limit})"));
    }
    let half = 0.5 * cylinder.r;
    let t0 = cylinder.t - cylinder.theta * half * half;
    let tol = 1e-12 * cylinder.t.abs().max(1.0);
    let mut pts: Vec<([f64; 3], f64, [f64; 3])> = Vec::new();
    for (t, u) in samples {
        if *t < t0 - tol || *t > cylinder.t + tol {
            continue;
        }
        let grid = *u.grid();
        let phys = u.to_physical();
        for_points_near(&grid, cylinder.center, half, |p, d| {
            if (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() <= half {
                pts.push((d, *t, [phys[0][p], phys[1][p], phys[2][p]]));
            }
        });
    }
    if pts.len() < 2 {
        return domain("too few samples inside the cylinder for a Hölder estimate");
    }
    let stride = pts.len().div_ceil(MAX_POINTS);
    let pts: Vec<_> = pts.into_iter().step_by(stride).collect();
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let (x, t, u) = pts[i];
            let (y, s, w) = pts[j];
            let dx2 = (0..3).map(|k| (x[k] - y[k]).powi(2)).sum::<f64>();
            let d = (dx2 + (t - s).abs()).sqrt();
            if d == 0.0 {
                continue;
            }
            let du = (0..3).map(|k| (u[k] - w[k]).powi(2)).sum::<f64>().sqrt();
            best = best.max(du / d.powf(alpha_h));
        }
    }
    Ok(HolderEstimate {
        alpha_h,
        seminorm: best,
        bound: c_bar / (cylinder.theta * cylinder.r.powf(1.0 + alpha_h)),
        points: pts.len(),
    })
}
