use serde::{Deserialize, Serialize};

/// Every tunable absolute constant of the certification. Only their existence
/// is known, so they are inputs and every report prints them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificationConstants {
    /// Generic constant `C` of the growth and coefficient formulas.
    pub c: f64,
    /// Local existence constant `C₀` (`T = C₀ ‖u₀‖_∞^{-2}`).
    pub c0: f64,
    pub delta1: f64,
    /// `None` selects the proof's choice `μ₁ = 4/θ²`.
    pub mu1: Option<f64>,
    pub delta2: f64,
    /// `None` selects `μ₂ = 2N/(κ²θρ)`.
    pub mu2: Option<f64>,
    /// Corollary constants.
    pub c1: f64,
    pub c2: f64,
    /// Constant of `T₀ = C ‖u₀‖_{L²}^4`.
    pub c_t0: f64,
    /// ε-regularity smallness `ε₀`.
    pub eps0: f64,
    /// `C̄ = C_{m=6,q₁,q₂}` of the local sup bound.
    pub c_bar: f64,
}

impl Default for CertificationConstants {
    fn default() -> Self {
        Self {
            c: 1.0,
            c0: 0.05,
            delta1: 0.1,
            mu1: None,
            delta2: 0.1,
            mu2: None,
            c1: 0.1,
            c2: 1.0,
            c_t0: 1.0,
            eps0: 0.01,
            c_bar: 2.01,
        }
    }
}

/// Constants of the `≲` bounds checked by the diagnostics, frozen after one
/// calibration pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// `‖∇u_ε(t)‖_∞ ≤ C max{M², M/√t}`.
    pub gradient: f64,
    /// `‖G g_ε(t)‖_∞ ≤ C ε M²`.
    pub duhamel: f64,
    /// `‖u(t)‖_∞ ≤ C ‖u₀‖_{L²} t^{-3/4}`.
    pub decay: f64,
    /// `‖u_ε - R_ε u_ε‖_∞ ≤ C ε ‖∇u_ε‖_∞`.
    #[serde(default = "one")]
    pub mollification: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self { gradient: 1.0, duhamel: 1.0, decay: 1.0, mollification: 1.0 }
    }
}
