use serde::{Deserialize, Serialize};

use super::window::point_value;
use crate::error::{domain, Result};
use crate::spectral::ops::riesz_tensor;
use crate::spectral::{Exponent, ScalarField, SpectralField, Stencil};

/// Operator constants of the localized Calderón–Zygmund bound
/// `‖Tf - Tf(x₀)‖ ≤ C_{n,p} α (γ + β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CzConstants {
    pub c_np: f64,
    /// `‖T‖_{L^p → L^p}`.
    pub gamma: f64,
    /// Kernel constant: `|m(x)| ≤ β|x|⁻³`, `|∇m(x)| ≤ β|x|⁻⁴`.
    pub beta: f64,
}

impl Default for CzConstants {
    fn default() -> Self {
        Self { c_np: 1.0, gamma: 1.0, beta: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CzCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Measured `α = sup_y ‖f‖_{L^q_t L^p_x(B_r(y) × Ω)}`.
    pub alpha: f64,
}

fn mixed_norm(per_sample: &[f64], weights: &[f64], q: Exponent) -> f64 {
    match q {
        Exponent::Infinity => per_sample.iter().cloned().fold(0.0, f64::max),
        Exponent::Finite(q) => per_sample.iter().zip(weights).map(|(x, w)| w * x.powf(q)).sum::<f64>().powf(1.0 / q),
    }
}

/// Check the localized bound for `T = R_i R_j` on samples `(μ_k, f_k)` of a
/// discrete measure space `Ω`.
pub fn cz_local_bound_check(
    f_samples: &[(f64, ScalarField)],
    component: (usize, usize),
    r: f64,
    x0: [f64; 3],
    p: f64,
    q: Exponent,
    constants: &CzConstants,
) -> Result<CzCheck> {
    if !(p > 1.0 && p.is_finite()) {
        return domain(format!("p = {p} must lie in (1, ∞)"));
    }
    if q.value() < 1.0 {
        return domain(format!("q = {q} must be at least 1"));
    }
    let Some((_, f0)) = f_samples.first() else {
        return domain("no samples");
    };
    let grid = *f0.grid();
    let ball = Stencil::ball(&grid, x0, r, 4)?;
    let weights: Vec<f64> = f_samples.iter().map(|s| s.0).collect();
    let mut centred = Vec::with_capacity(f_samples.len());
    let mut local: Vec<Vec<f64>> = Vec::with_capacity(f_samples.len());
    let origin = Stencil::ball(&grid, [0.0; 3], r, 4)?;
    let conv = crate::spectral::Convolver::new(&grid, &origin);
    for (_, f) in f_samples {
        let tf = riesz_tensor(f, component.0, component.1);
        let at = point_value(&tf, x0);
        let vals = tf.to_physical();
        centred.push(ball.integrate_with(|i| (vals[i] - at).abs().powf(p)).powf(1.0 / p));
        let fp: Vec<f64> = f.to_physical().iter().map(|x| x.abs().powf(p)).collect();
        local.push(conv.apply(&fp).into_iter().map(|x| x.max(0.0).powf(1.0 / p)).collect());
    }
    let lhs = mixed_norm(&centred, &weights, q);
    let npts = grid.physical_len();
    let alpha = (0..npts)
        .map(|y| mixed_norm(&local.iter().map(|l| l[y]).collect::<Vec<_>>(), &weights, q))
        .fold(0.0, f64::max);
    if !alpha.is_finite() {
        return domain("sup_y ‖f‖ is not finite");
    }
    let rhs = constants.c_np * alpha * (constants.gamma + constants.beta);
    let ratio = if rhs > 0.0 { lhs / rhs } else if lhs == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(CzCheck { lhs, rhs, ratio, alpha })
}
