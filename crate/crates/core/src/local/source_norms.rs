use serde::{Deserialize, Serialize};

use super::exponents::LocalExponents;
use super::window::{CenterSet, IntervalIntegrals, OffsetStencil};
use crate::error::{domain, Result};
use crate::spectral::{Convolver, Exponent, SpectralField, Stencil, TensorField, VectorField};

/// `κ₀ = sup_y ‖a‖_{L^m(Q)}`, `κ₁ = sup_y ‖f‖_{L^{q₁}(Q)}`,
/// `κ₂ = sup_y ‖g‖_{L^{q₂}(Q)}` with `Q = B_{2r}(y) × (c, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceNorms {
    pub kappa0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub r: f64,
    pub start: f64,
    pub end: f64,
}

/// One time sample of `(a, f, g)`; absent fields are zero.
#[derive(Debug, Clone, Copy)]
pub struct SourceSample<'a> {
    pub t: f64,
    pub a: Option<&'a VectorField>,
    pub f: Option<&'a VectorField>,
    pub g: Option<&'a TensorField>,
}

fn check(p: Exponent, name: &str) -> Result<()> {
    if p.value() < 1.0 {
        return domain(format!("{name} = {p} is not a norm exponent"));
    }
    Ok(())
}

/// Mixed space-time norms over `B_{2r}(y) × interval`, maximised over the
/// centres. Uses `m_energy` for `a`.
pub fn source_norms(
    samples: &[SourceSample],
    r: f64,
    interval: (f64, f64),
    centers: &CenterSet,
    exponents: &LocalExponents,
) -> Result<SourceNorms> {
    let m = Exponent::finite(exponents.m_energy)?;
    check(exponents.q1, "q1")?;
    check(exponents.q2, "q2")?;
    let grid = samples
        .iter()
        .find_map(|s| s.a.map(|x| *x.grid()).or(s.f.map(|x| *x.grid())).or(s.g.map(|x| *x.grid())));
    let Some(grid) = grid else {
        return Ok(SourceNorms { kappa0: 0.0, kappa1: 0.0, kappa2: 0.0, r, start: interval.0, end: interval.1 });
    };
    let ball = Stencil::ball(&grid, [0.0; 3], 2.0 * r, 4)?;
    let conv = Convolver::new(&grid, &ball);
    let offs = OffsetStencil::from_origin(&grid, &ball);
    let idx = centers.indices(&grid)?;
    let tol = 1e-9 * (interval.1 - interval.0).abs().max(1e-300);
    let exps = [m, exponents.q1, exponents.q2];
    let mut integ = IntervalIntegrals::new(3, idx.len(), vec![interval], tol);
    let mut sup = [vec![0.0f64; idx.len()], vec![0.0; idx.len()], vec![0.0; idx.len()]];
    for s in samples {
        if s.t < interval.0 - tol || s.t > interval.1 + tol {
            continue;
        }
        let mags = [s.a.map(|x| x.magnitude()), s.f.map(|x| x.magnitude()), s.g.map(|x| x.magnitude())];
        let mut chans = Vec::with_capacity(3);
        for (c, (mag, p)) in mags.iter().zip(exps).enumerate() {
            match (mag, p) {
                (None, _) => chans.push(vec![0.0; idx.len()]),
                (Some(mag), Exponent::Infinity) => {
                    for (slot, &y) in sup[c].iter_mut().zip(&idx) {
                        *slot = slot.max(offs.max_at(y, |i| mag[i]));
                    }
                    chans.push(vec![0.0; idx.len()]);
                }
                (Some(mag), Exponent::Finite(q)) => {
                    let pw: Vec<f64> = mag.iter().map(|x| x.powf(q)).collect();
                    let full = conv.apply(&pw);
                    chans.push(idx.iter().map(|&y| full[y].max(0.0)).collect());
                }
            }
        }
        integ.push(s.t, chans)?;
    }
    let ints = integ.finish()?.remove(0);
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = match exps[c] {
            Exponent::Infinity => sup[c].iter().cloned().fold(0.0, f64::max),
            Exponent::Finite(q) => ints[c].iter().cloned().fold(0.0, f64::max).powf(1.0 / q),
        };
    }
    Ok(SourceNorms { kappa0: out[0], kappa1: out[1], kappa2: out[2], r, start: interval.0, end: interval.1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn constant_a_closed_form() {
        let g = Grid::periodic_2pi(16).unwrap();
        let c = [0.6, 0.0, 0.8];
        let a = VectorField::from_fn(g, |_| c);
        let s: Vec<SourceSample> = (0..5).map(|i| SourceSample { t: 0.05 * i as f64, a: Some(&a), f: None, g: None }).collect();
        let e = LocalExponents::regularization_default();
        let n = source_norms(&s, 0.5, (0.0, 0.2), &CenterSet::Stride(4), &e).unwrap();
        let ball = Stencil::ball(&g, [0.0; 3], 1.0, 4).unwrap().measure();
        let expect = 1.0 * (ball * 0.2f64).powf(1.0 / 5.0);
        assert!((n.kappa0 - expect).abs() < 1e-10 * expect);
        assert_eq!((n.kappa1, n.kappa2), (0.0, 0.0));
        let none: Vec<SourceSample> = (0..2).map(|i| SourceSample { t: i as f64, a: None, f: None, g: None }).collect();
        let z = source_norms(&none, 0.5, (0.0, 1.0), &CenterSet::Stride(4), &e).unwrap();
        assert_eq!(z.kappa0, 0.0);
    }
}
