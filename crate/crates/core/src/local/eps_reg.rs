use serde::{Deserialize, Serialize};

use super::exponents::LocalExponents;
use super::window::{integrate_series, point_value};
use crate::error::{domain, Result};
use crate::spectral::{ScalarField, SpectralField, Stencil, TensorField, VectorField};

/// `Q_{r,θ}(z) = B_r(x) × (t - θr², t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicCylinder {
    pub center: [f64; 3],
    pub t: f64,
    pub r: f64,
    pub theta: f64,
}

impl ParabolicCylinder {
    pub fn new(center: [f64; 3], t: f64, r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0) {
            return domain(format!("cylinder radius {r} must be positive"));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return domain(format!("cylinder aspect θ = {theta} must lie in (0, 1]"));
        }
        Ok(Self { center, t, r, theta })
    }

    pub fn start(&self) -> f64 {
        self.t - self.theta * self.r * self.r
    }
}

/// One time sample of the fields entering the ε-regularity quantity.
#[derive(Debug, Clone, Copy)]
pub struct EpsRegSample<'a> {
    pub t: f64,
    pub u: &'a VectorField,
    pub p: Option<&'a ScalarField>,
    pub a: Option<&'a VectorField>,
    pub f: Option<&'a VectorField>,
    pub g: Option<&'a TensorField>,
}

/// The four-term quantity with its verdict against `θε₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsRegValue {
    /// `(x, y, z, t)`.
    pub z0: [f64; 4],
    pub r: f64,
    pub theta: f64,
    pub terms: [f64; 4],
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Space integrals over `B_r(x₀)` at one sample: `|u|³`, `|p - p̄|^{3/2}`,
/// `|a|^m`, `|f|^{q₁}`, `|g|^{q₂}`.
fn ball_integrals(
    s: &EpsRegSample,
    ball: &Stencil,
    p_bar: f64,
    m: f64,
    q1: f64,
    q2: f64,
) -> [f64; 5] {
    let pow_int = |mag: Vec<f64>, e: f64| ball.integrate_with(|p| mag[p].powf(e));
    let iu = pow_int(s.u.magnitude(), 3.0);
    let ip = s.p.map_or(0.0, |p| {
        let vals = p.to_physical();
        ball.integrate_with(|i| (vals[i] - p_bar).abs().powf(1.5))
    });
    let ia = s.a.map_or(0.0, |a| pow_int(a.magnitude(), m));
    let if_ = s.f.map_or(0.0, |f| pow_int(f.magnitude(), q1));
    let ig = s.g.map_or(0.0, |g| pow_int(g.magnitude(), q2));
    [iu, ip, ia, if_, ig]
}

/// Combine time-integrated ball integrals into the four terms
/// `r⁻²(∫|u|³ + ∫|p - p̄|^{3/2})`, `r^{m-5}∫|a|^m`, `r^{3q₁-5}∫|f|^{q₁}`,
/// `r^{2q₂-5}∫|g|^{q₂}`.
pub(crate) fn combine_terms(r: f64, ints: [f64; 5], m: f64, q1: f64, q2: f64) -> [f64; 4] {
    [
        (ints[0] + ints[1]) / (r * r),
        r.powf(m - 5.0) * ints[2],
        r.powf(3.0 * q1 - 5.0) * ints[3],
        r.powf(2.0 * q2 - 5.0) * ints[4],
    ]
}

pub(crate) fn check_exponents(e: &LocalExponents) -> Result<(f64, f64, f64)> {
    let (m, q1, q2) = (e.m_reg, e.q1_effective(), e.q2_effective());
    if !(m > 5.0) {
        return domain(format!("m = {m} must exceed 5"));
    }
    if !(q1 > 2.5) {
        return domain(format!("q1 = {q1} must exceed 5/2"));
    }
    if !(q2 > 5.0) {
        return domain(format!("q2 = {q2} must exceed 5"));
    }
    Ok((m, q1, q2))
}

/// `(1/r²)∫(|u|³ + |p - p̄|^{3/2}) + r^{m-5}∫|a|^m + r^{3q₁-5}∫|f|^{q₁} + r^{2q₂-5}∫|g|^{q₂}`
/// over the cylinder, with `p̄(s) = p(x₀, s)` when `oscillation` is set and
/// `0` otherwise. Infinite `q₁`, `q₂` use the surrogate exponents.
pub fn eps_regularity_quantity(
    samples: &[EpsRegSample],
    cylinder: &ParabolicCylinder,
    exponents: &LocalExponents,
    eps0: f64,
    oscillation: bool,
) -> Result<EpsRegValue> {
    let (m, q1, q2) = check_exponents(exponents)?;
    let Some(first) = samples.first() else {
        return domain("no samples for the ε-regularity quantity");
    };
    let grid = *first.u.grid();
    let ball = Stencil::ball(&grid, cylinder.center, cylinder.r, 4)?;
    let (a, b) = (cylinder.start(), cylinder.t);
    let tol = 1e-9 * (b - a);
    let all: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let lo = all.partition_point(|&t| t < a - tol).saturating_sub(1);
    let hi = (all.partition_point(|&t| t <= b + tol) + 1).min(all.len());
    let used = &samples[lo..hi];
    let times: Vec<f64> = used.iter().map(|s| s.t).collect();
    let mut per = vec![Vec::with_capacity(used.len()); 5];
    for s in used {
        let p_bar = match (oscillation, s.p) {
            (true, Some(p)) => point_value(p, cylinder.center),
            _ => 0.0,
        };
        let v = ball_integrals(s, &ball, p_bar, m, q1, q2);
        for (c, x) in per.iter_mut().zip(v) {
            c.push(x);
        }
    }
    let mut ints = [0.0; 5];
    for (i, c) in per.iter().enumerate() {
        ints[i] = integrate_series(&times, c, a, b, tol)?;
    }
    let terms = combine_terms(cylinder.r, ints, m, q1, q2);
    let value: f64 = terms.iter().sum();
    let threshold = cylinder.theta * eps0;
    Ok(EpsRegValue {
        z0: [cylinder.center[0], cylinder.center[1], cylinder.center[2], cylinder.t],
        r: cylinder.r,
        theta: cylinder.theta,
        terms,
        value,
        threshold,
        pass: value < threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn zero_fields_pass() {
        let g = Grid::periodic_2pi(16).unwrap();
        let u = VectorField::zeros(g);
        let s: Vec<EpsRegSample> = (0..4)
            .map(|i| EpsRegSample { t: i as f64 * 0.05, u: &u, p: None, a: None, f: None, g: None })
            .collect();
        let cyl = ParabolicCylinder::new([1.0, 1.0, 1.0], 0.15, 0.5, 0.5).unwrap();
        let v = eps_regularity_quantity(&s, &cyl, &LocalExponents::regularization_default(), 0.01, true).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.pass);
    }
}
