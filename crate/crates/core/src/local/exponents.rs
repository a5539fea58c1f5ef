use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::Exponent;

/// Integrability exponents and the scaling exponents of the local source
/// bounds `‖f‖ ≲ ε^{ν₁} r^{ν₂} M^{ν₃}`, `‖g‖ ≲ ε^{σ₁} r^{σ₂} M^{σ₃}`,
/// `‖u_{0ε} - u₀‖ ≲ ε^{λ₁} r^{λ₂} M^{λ₃}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalExponents {
    pub q1: Exponent,
    pub q2: Exponent,
    pub nu: [f64; 3],
    pub sigma: [f64; 3],
    pub lambda: [f64; 3],
    /// `m` used for the energy coefficients (`a = u_ε`).
    pub m_energy: f64,
    /// `m` used for the ε-regularity quantity and `C̄`.
    pub m_reg: f64,
    /// Finite stand-ins when `q₁ = ∞` or `q₂ = ∞`.
    pub q1_surrogate: f64,
    pub q2_surrogate: f64,
}

const TOL: f64 = 1e-12;

impl LocalExponents {
    pub fn new(
        q1: Exponent,
        q2: Exponent,
        nu: [f64; 3],
        sigma: [f64; 3],
        lambda: [f64; 3],
    ) -> Result<Self> {
        let e = Self { q1, q2, nu, sigma, lambda, m_energy: 5.0, m_reg: 6.0, q1_surrogate: 3.0, q2_surrogate: 6.0 };
        e.validate()?;
        Ok(e)
    }

    /// The tuple that both built-in regularizations satisfy:
    /// `q₁ = q₂ = ∞`, `ν = (1, 0, 4)`, `σ = (1, 0, 3)`, `λ = (1, 3/2, 2)`.
    pub fn regularization_default() -> Self {
        Self::new(Exponent::Infinity, Exponent::Infinity, [1.0, 0.0, 4.0], [1.0, 0.0, 3.0], [1.0, 1.5, 2.0])
            .expect("built-in tuple is consistent")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q1.value() > 2.5) {
            return domain(format!("q1 = {} must exceed 5/2", self.q1));
        }
        if !(self.q2.value() > 5.0) {
            return domain(format!("q2 = {} must exceed 5", self.q2));
        }
        let checks = [
            ("nu", self.nu, -3.0 + 5.0 * self.q1.reciprocal()),
            ("sigma", self.sigma, -2.0 + 5.0 * self.q2.reciprocal()),
            ("lambda", self.lambda, 0.5),
        ];
        for (name, v, target) in checks {
            if !(v[0] > 0.0) || v[1] < 0.0 || v[2] < 0.0 {
                return domain(format!("{name} = {v:?}: first entry must be positive, others nonnegative"));
            }
            let got = v[0] + v[1] - v[2];
            if (got - target).abs() > TOL {
                return domain(format!("{name}1 + {name}2 - {name}3 = {got}, expected {target}"));
            }
        }
        if !(self.m_energy >= 5.0) || !(self.m_reg > 5.0) {
            return domain(format!("m must satisfy m_energy ≥ 5 and m_reg > 5 (got {}, {})", self.m_energy, self.m_reg));
        }
        if !(self.q1_surrogate > 2.5 && self.q2_surrogate > 5.0) {
            return domain("surrogate exponents must exceed 5/2 and 5");
        }
        Ok(())
    }

    /// `ρ = min{ν₁, σ₁, λ₁}`.
    pub fn rho(&self) -> f64 {
        self.nu[0].min(self.sigma[0]).min(self.lambda[0])
    }

    pub fn q1_effective(&self) -> f64 {
        match self.q1 {
            Exponent::Finite(q) => q,
            Exponent::Infinity => self.q1_surrogate,
        }
    }

    pub fn q2_effective(&self) -> f64 {
        match self.q2 {
            Exponent::Finite(q) => q,
            Exponent::Infinity => self.q2_surrogate,
        }
    }

    /// Upper limit for the Hölder exponent, `min{2 - 5/q₁, 1 - 5/q₂, 1 - 5/m}`.
    pub fn holder_limit(&self) -> f64 {
        (2.0 - 5.0 / self.q1_effective()).min(1.0 - 5.0 / self.q2_effective()).min(1.0 - 5.0 / self.m_reg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tuple_is_valid() {
        let e = LocalExponents::regularization_default();
        assert_eq!(e.rho(), 1.0);
        assert_eq!(e.q2_effective(), 6.0);
    }

    #[test]
    fn rejects_inconsistent_tuples() {
        let inf = Exponent::Infinity;
        assert!(LocalExponents::new(inf, inf, [1.0, 0.0, 4.0], [1.0, 0.0, 2.0], [1.0, 1.5, 2.0]).is_err());
        assert!(LocalExponents::new(Exponent::Finite(2.0), inf, [1.0, 0.0, 4.0], [1.0, 0.0, 3.0], [1.0, 1.5, 2.0]).is_err());
        assert!(LocalExponents::new(inf, inf, [0.0, 1.0, 4.0], [1.0, 0.0, 3.0], [1.0, 1.5, 2.0]).is_err());
        // q1 = 5 gives -3 + 1 = -2.
        assert!(LocalExponents::new(Exponent::Finite(5.0), inf, [1.0, 0.0, 3.0], [1.0, 0.0, 3.0], [1.0, 1.5, 2.0]).is_ok());
    }
}
