use serde::{Deserialize, Serialize};

use super::exponents::LocalExponents;
use crate::error::{domain, Result};

/// Coefficients of the local energy recursion `e ≤ e(c⁺) + αe^{1/2} + βe + γe^{3/2}`
/// and of the pressure-oscillation bound `α′ + β′e^{3/4} + γ′e^{3/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub alpha_p: f64,
    pub beta_p: f64,
    pub gamma_p: f64,
}

fn check_inputs(epsilon: f64, m: f64, kappa: f64, theta: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !(m > 0.0) {
        return domain(format!("need ε ≥ 0 and M > 0 (got {epsilon}, {m})"));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return domain(format!("κ = {kappa} must lie in (0, 1]"));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return domain(format!("θ = {theta} must lie in (0, 1]"));
    }
    Ok(())
}

pub fn coefficients(
    epsilon: f64,
    m: f64,
    kappa: f64,
    theta: f64,
    exponents: &LocalExponents,
    c: f64,
) -> Result<CoefficientSet> {
    check_inputs(epsilon, m, kappa, theta)?;
    let em = epsilon * m;
    let bracket = em.powf(exponents.nu[0]) + em.powf(exponents.sigma[0]);
    Ok(CoefficientSet {
        alpha: c * bracket * m.powf(-0.5) * kappa.sqrt(),
        beta: c * theta.powf(0.2),
        gamma: c * m.sqrt() / kappa.sqrt(),
        alpha_p: c * bracket.powf(1.5) * m.powi(-2) * kappa.powi(3),
        beta_p: c * kappa.powf(2.25) * m.powf(-1.25),
        gamma_p: c * kappa.sqrt() * theta.powf(0.25) / m.sqrt(),
    })
}

/// `α` of the windowed induction, which also carries the initial-data
/// exponent: `C[(εM)^{ν₁} + (εM)^{σ₁} + (εM)^{λ₁}]M^{-1/2}κ^{1/2}`.
pub fn induction_alpha(epsilon: f64, m: f64, kappa: f64, exponents: &LocalExponents, c: f64) -> f64 {
    let em = epsilon * m;
    let bracket = em.powf(exponents.nu[0]) + em.powf(exponents.sigma[0]) + em.powf(exponents.lambda[0]);
    c * bracket * m.powf(-0.5) * kappa.sqrt()
}
