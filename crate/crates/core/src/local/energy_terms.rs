use serde::{Deserialize, Serialize};

use super::bump::BumpFunction;
use super::window::integrate_series;
use crate::error::{domain, Result};
use crate::spectral::ops::gradient;
use crate::spectral::{ScalarField, SpectralField, TensorField, VectorField};

/// Fields at one time for the local energy balance of
/// `∂_t u - Δu + div(a⊗u + u⊗a + u⊗u) + ∇p = f + div g`.
#[derive(Debug, Clone, Copy)]
pub struct TermSample<'a> {
    pub t: f64,
    pub u: &'a VectorField,
    pub p: &'a ScalarField,
    pub a: Option<&'a VectorField>,
    pub f: Option<&'a VectorField>,
    pub g: Option<&'a TensorField>,
}

/// The nine flux terms of `k_y(c, t)` and both sides of the balance
/// `ξ(t) + ∫∫|∇u|²φ = ξ(c) + k_y(c, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerms {
    pub terms: [f64; 9],
    pub sum: f64,
    /// `∫|u(c)|²/2 φ`.
    pub xi_start: f64,
    /// `∫|u(t)|²/2 φ`.
    pub xi_end: f64,
    /// `∫_c^t ∫|∇u|²φ`.
    pub dissipation: f64,
}

impl EnergyTerms {
    /// `ξ(t) + ∫∫|∇u|²φ - ξ(c) - k_y(c, t)`; zero up to discretisation.
    pub fn balance_defect(&self) -> f64 {
        self.xi_end + self.dissipation - self.xi_start - self.sum
    }
}

/// Pointwise integrands: the nine terms, `|u|²/2 φ` and `|∇u|²φ`.
fn integrands(s: &TermSample, bump: &BumpFunction) -> [f64; 11] {
    let u = s.u.to_physical();
    let grad = gradient(s.u).physical_components();
    let p = s.p.to_physical();
    let a = s.a.map(|a| a.to_physical());
    let f = s.f.map(|f| f.to_physical());
    let g = s.g.map(|g| g.physical_components());
    let cell = s.u.grid().cell_volume();
    let mut out = [0.0; 11];
    for &(idx, phi, dphi, lap) in &bump.samples {
        let uv = [u[0][idx], u[1][idx], u[2][idx]];
        let half = 0.5 * (uv[0] * uv[0] + uv[1] * uv[1] + uv[2] * uv[2]);
        let u_dphi = uv[0] * dphi[0] + uv[1] * dphi[1] + uv[2] * dphi[2];
        // grad[3i + j] = ∂_i u_j
        let du = |i: usize, j: usize| grad[3 * i + j][idx];
        let mut t = [0.0; 9];
        t[0] = half * lap;
        t[1] = half * u_dphi;
        t[2] = p[idx] * u_dphi;
        if let Some(a) = &a {
            let av = [a[0][idx], a[1][idx], a[2][idx]];
            let a_dphi = av[0] * dphi[0] + av[1] * dphi[1] + av[2] * dphi[2];
            let ua = uv[0] * av[0] + uv[1] * av[1] + uv[2] * av[2];
            t[3] = half * a_dphi;
            let mut conv = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    conv += av[i] * uv[j] * du(j, i);
                }
            }
            t[4] = conv * phi;
            t[5] = ua * u_dphi;
        }
        if let Some(f) = &f {
            t[6] = (uv[0] * f[0][idx] + uv[1] * f[1][idx] + uv[2] * f[2][idx]) * phi;
        }
        if let Some(g) = &g {
            let mut t8 = 0.0;
            let mut t9 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let gij = g[3 * i + j][idx];
                    t8 -= gij * du(j, i) * phi;
                    t9 -= gij * uv[i] * dphi[j];
                }
            }
            t[7] = t8;
            t[8] = t9;
        }
        for k in 0..9 {
            out[k] += cell * t[k];
        }
        out[9] += cell * half * phi;
        let gsq: f64 = grad.iter().map(|c| c[idx] * c[idx]).sum();
        out[10] += cell * gsq * phi;
    }
    out
}

/// Nine-term breakdown of the local energy flux over `interval`.
pub fn local_energy_terms(samples: &[TermSample], bump: &BumpFunction, interval: (f64, f64)) -> Result<EnergyTerms> {
    if samples.is_empty() {
        return domain("no samples for the local energy terms");
    }
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let rows: Vec<[f64; 11]> = samples.iter().map(|s| integrands(s, bump)).collect();
    let tol = 1e-9 * (interval.1 - interval.0).abs().max(1e-300);
    let col = |k: usize| -> Vec<f64> { rows.iter().map(|r| r[k]).collect() };
    let mut terms = [0.0; 9];
    for (k, slot) in terms.iter_mut().enumerate() {
        *slot = integrate_series(&times, &col(k), interval.0, interval.1, tol)?;
    }
    let xi = col(9);
    let at = |t: f64| interp(&times, &xi, t);
    Ok(EnergyTerms {
        sum: terms.iter().sum(),
        terms,
        xi_start: at(interval.0),
        xi_end: at(interval.1),
        dissipation: integrate_series(&times, &col(10), interval.0, interval.1, tol)?,
    })
}

fn interp(times: &[f64], v: &[f64], t: f64) -> f64 {
    if times.len() == 1 {
        return v[0];
    }
    let i = times.partition_point(|&s| s < t).clamp(1, times.len() - 1);
    v[i - 1] + (v[i] - v[i - 1]) * (t - times[i - 1]) / (times[i] - times[i - 1])
}

/// Upper-bound shapes (constant 1) of the nine terms in terms of the window
/// length `t`, radius `r`, windowed energy `e` and source norms.
pub fn term_bounds(t: f64, r: f64, e: f64, kappa: [f64; 3], m: f64, q1: f64, q2: f64) -> [f64; 9] {
    let tr3 = t * r.powi(3);
    let l3 = t.powf(1.0 / 3.0) * r.powf(-0.5) + t.powf(1.0 / 12.0);
    let [k0, k1, k2] = kappa;
    let p_osc = k1 * r * tr3.powf(2.0 / 3.0 - 1.0 / q1)
        + k2 * tr3.powf(2.0 / 3.0 - 1.0 / q2)
        + k0 * tr3.powf(1.0 / 3.0 - 1.0 / m) * l3 * e.sqrt()
        + (t.powf(2.0 / 3.0) / r + t.powf(1.0 / 6.0)) * e;
    let a46 = k0 * (t.powf(2.0 / 3.0) / r + t.powf(1.0 / 6.0)) * r.powf(-3.0 / m) * t.powf(1.0 / 3.0 - 1.0 / m) * e;
    [
        t / (r * r) * e,
        (t * r.powf(-2.5) + t.powf(0.25) / r) * e.powf(1.5),
        p_osc * l3 * e.sqrt() / r,
        a46,
        k0 * (r.powf(-0.6) * t.powf(0.3) + 1.0) * tr3.powf(0.2 - 1.0 / m) * e,
        a46,
        k1 * l3 * tr3.powf(2.0 / 3.0 - 1.0 / q1) * e.sqrt(),
        k2 * tr3.powf(0.5 - 1.0 / q2) * e.sqrt(),
        k2 / r * tr3.powf(2.0 / 3.0 - 1.0 / q2) * l3 * e.sqrt(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn zero_velocity_gives_zero_terms() {
        let g = Grid::periodic_2pi(16).unwrap();
        let u = VectorField::zeros(g);
        let p = ScalarField::from_fn(g, |x| x[0].sin());
        let a = VectorField::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]);
        let b = BumpFunction::new(0.5, [1.0; 3], &g).unwrap();
        let s: Vec<TermSample> =
            (0..3).map(|i| TermSample { t: 0.1 * i as f64, u: &u, p: &p, a: Some(&a), f: None, g: None }).collect();
        let e = local_energy_terms(&s, &b, (0.0, 0.2)).unwrap();
        assert!(e.terms.iter().all(|&x| x == 0.0));
    }
}
