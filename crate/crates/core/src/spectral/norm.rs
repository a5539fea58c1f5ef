use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::field::{pointwise_magnitude, SpectralField};
use super::quadrature::Stencil;
use crate::error::{domain, Error, Result};

/// Integrability exponent, finite or `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return domain(format!("exponent {p} must be finite and at least 1"));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// Numeric value, `f64::INFINITY` for `∞`.
    pub fn value(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, zero for `∞`.
    pub fn reciprocal(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("cannot parse exponent {other:?}")))
                .and_then(Exponent::finite),
        }
    }
}

/// Spatial region for restricted norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Ball { center: [f64; 3], radius: f64 },
}

/// `‖w‖_{L²}` over the whole box by Parseval.
pub fn l2_norm<F: SpectralField>(w: &F) -> f64 {
    l2_norm_squared(w).sqrt()
}

pub fn l2_norm_squared<F: SpectralField>(w: &F) -> f64 {
    let grid = w.grid();
    let mut acc = 0.0;
    for comp in w.components() {
        for (idx, c) in comp.iter().enumerate() {
            acc += grid.hermitian_weight(idx) * c.norm_sqr();
        }
    }
    acc * grid.volume()
}

/// `‖w‖_{L∞}` of the Euclidean magnitude, evaluated on the 2× padded grid.
pub fn linf_norm<F: SpectralField>(w: &F) -> f64 {
    w.magnitude_padded(2).into_iter().fold(0.0, f64::max)
}

/// General `‖w‖_{Lᵖ(region)}` by grid quadrature (padded grid for `p = ∞`).
pub fn norm<F: SpectralField>(w: &F, p: Exponent, region: Option<&Region>) -> Result<f64> {
    match (p, region) {
        (Exponent::Finite(p), None) if p == 2.0 => Ok(l2_norm(w)),
        (Exponent::Infinity, None) => Ok(linf_norm(w)),
        (Exponent::Finite(p), None) => {
            let mag = w.magnitude();
            let cell = w.grid().cell_volume();
            Ok((mag.iter().map(|m| m.powf(p)).sum::<f64>() * cell).powf(1.0 / p))
        }
        (p, Some(Region::Ball { center, radius })) => {
            let (grid, mag) = if p.is_infinite() {
                (w.grid().refined(2), w.magnitude_padded(2))
            } else {
                (*w.grid(), w.magnitude())
            };
            let stencil = Stencil::ball(&grid, *center, *radius, 6)?;
            Ok(stencil_norm(&stencil, &mag, p))
        }
    }
}

/// `‖mag‖_{Lᵖ}` with respect to the stencil weights.
pub fn stencil_norm(stencil: &Stencil, mag: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => stencil.max_of(mag),
        Exponent::Finite(p) => stencil.integrate_with(|i| mag[i].powf(p)).powf(1.0 / p),
    }
}

/// Magnitude of a list of physical component arrays.
pub fn magnitude_of(comps: &[Vec<f64>]) -> Vec<f64> {
    pointwise_magnitude(comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, ScalarField, VectorField};
    use std::f64::consts::PI;

    #[test]
    fn sine_norms() {
        let g = Grid::periodic_2pi(16).unwrap();
        let w = VectorField::from_fn(g, |x| [x[0].sin(), 0.0, 0.0]);
        let expect = (2.0 * PI).powf(1.5) / 2f64.sqrt();
        assert!((l2_norm(&w) - expect).abs() < 1e-12);
        assert!((linf_norm(&w) - 1.0).abs() < 1e-6);
        let q = norm(&w, Exponent::Finite(2.0), None).unwrap();
        assert!((q - expect).abs() < 1e-12);
        let z = VectorField::zeros(g);
        for p in [Exponent::Finite(1.5), Exponent::Finite(3.0), Exponent::Infinity] {
            assert_eq!(norm(&z, p, None).unwrap(), 0.0);
        }
    }

    #[test]
    fn ball_norm_of_constant() {
        let g = Grid::periodic_2pi(32).unwrap();
        let s = ScalarField::from_fn(g, |_| 2.0);
        let r = 1.0;
        let region = Region::Ball { center: [3.0, 3.0, 3.0], radius: r };
        let v = norm(&s, Exponent::Finite(1.0), Some(&region)).unwrap();
        let exact = 2.0 * 4.0 / 3.0 * PI;
        assert!((v / exact - 1.0).abs() < 5e-3);
        assert!((norm(&s, Exponent::Infinity, Some(&region)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("1.5".parse::<Exponent>().unwrap(), Exponent::Finite(1.5));
        assert!("0.5".parse::<Exponent>().is_err());
    }
}
