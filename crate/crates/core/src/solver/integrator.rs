use crate::error::{Error, Result};
use crate::regularization::Regularization;
use crate::spectral::{Grid, SpectralField, VectorField};

/// `φ₁(z) = (e^z - 1)/z` and `φ₂(z) = (e^z - 1 - z)/z²`.
pub fn phi_functions(z: f64) -> (f64, f64) {
    if z.abs() < 1e-2 {
        let z2 = z * z;
        let z3 = z2 * z;
        let z4 = z3 * z;
        let z5 = z4 * z;
        let p1 = 1.0 + z / 2.0 + z2 / 6.0 + z3 / 24.0 + z4 / 120.0 + z5 / 720.0;
        let p2 = 0.5 + z / 6.0 + z2 / 24.0 + z3 / 120.0 + z4 / 720.0 + z5 / 5040.0;
        (p1, p2)
    } else {
        let e = z.exp_m1();
        (e / z, (e - z) / (z * z))
    }
}

/// Per-mode ETD coefficients `(e^{-|k|²h}, hφ₁, hφ₂)` for step `h`.
#[derive(Debug, Clone)]
pub struct EtdCoefficients {
    pub h: f64,
    pub decay: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
}

impl EtdCoefficients {
    pub fn new(grid: &Grid, h: f64) -> Self {
        let len = grid.spectral_len();
        let mut decay = Vec::with_capacity(len);
        let mut phi1 = Vec::with_capacity(len);
        let mut phi2 = Vec::with_capacity(len);
        for idx in 0..len {
            let z = -grid.k_squared(idx) * h;
            let (p1, p2) = phi_functions(z);
            decay.push(z.exp());
            phi1.push(h * p1);
            phi2.push(h * p2);
        }
        Self { h, decay, phi1, phi2 }
    }
}

/// Second-order exponential time differencing for
/// `∂_t u = Δu + N(u)`, `N(u) = -ℙ[div(u⊗u)]_reg`.
#[derive(Debug, Clone)]
pub struct Integrator {
    reg: Regularization,
    coeffs: EtdCoefficients,
    state: VectorField,
    steps: usize,
    ceiling: f64,
}

impl Integrator {
    pub fn new(u0: VectorField, h: f64, reg: Regularization) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("time step {h} must be positive")));
        }
        let coeffs = EtdCoefficients::new(u0.grid(), h);
        Ok(Self { reg, coeffs, state: u0, steps: 0, ceiling: 1e6 })
    }

    /// Coefficient magnitude ceiling treated as blow-up.
    pub fn with_ceiling(mut self, ceiling: f64) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn state(&self) -> &VectorField {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.time()
    }

    pub fn h(&self) -> f64 {
        self.coeffs.h
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn regularization(&self) -> &Regularization {
        &self.reg
    }

    /// Advance one step in place.
    pub fn advance(&mut self) -> Result<&VectorField> {
        let next = step_with(&self.state, &self.coeffs, &self.reg)?;
        let t = self.state.time();
        if !next.is_finite() || next.max_coeff() > self.ceiling {
            return Err(Error::BlowUp {
                last_valid_time: t,
                reason: format!("state left the admissible range at step {}", self.steps + 1),
            });
        }
        self.steps += 1;
        self.state = next.with_time(t + self.coeffs.h);
        Ok(&self.state)
    }
}

fn combine(out: &mut VectorField, terms: &[(&VectorField, &[f64])]) {
    for c in 0..3 {
        let dst = &mut out.comps_mut()[c];
        for (idx, d) in dst.iter_mut().enumerate() {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for (f, w) in terms {
                acc += f.comps()[c][idx] * w[idx];
            }
            *d = acc;
        }
    }
}

fn step_with(u: &VectorField, co: &EtdCoefficients, reg: &Regularization) -> Result<VectorField> {
    let nu = reg.nonlinearity(u)?;
    let mut a = VectorField::zeros(*u.grid());
    combine(&mut a, &[(u, &co.decay), (&nu, &co.phi1)]);
    let na = reg.nonlinearity(&a)?;
    let diff = na.sub(&nu)?;
    let mut out = VectorField::zeros(*u.grid());
    let ones = vec![1.0; co.decay.len()];
    combine(&mut out, &[(&a, &ones), (&diff, &co.phi2)]);
    Ok(out)
}

/// One ETDRK2 step of size `h` from `u`.
pub fn step(u: &VectorField, h: f64, reg: &Regularization) -> Result<VectorField> {
    let mut it = Integrator::new(u.clone(), h, reg.clone())?;
    it.advance()?;
    Ok(it.state.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_branches_agree() {
        for &z in &[-0.0099, -0.0101, -0.5, -5.0] {
            let (p1, p2) = phi_functions(z);
            let e = f64::exp(z);
            assert!((p1 - (e - 1.0) / z).abs() < 1e-10);
            assert!((p2 - (e - 1.0 - z) / (z * z)).abs() < 1e-8);
        }
        assert_eq!(phi_functions(0.0), (1.0, 0.5));
    }
}
