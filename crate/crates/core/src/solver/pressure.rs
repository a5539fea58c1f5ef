use crate::error::Result;
use crate::spectral::ops::{divergence, inverse_laplacian, outer, riesz_contract};
use crate::spectral::{ScalarField, SpectralField, TensorField, VectorField};

/// Pressure of `∂_t u - Δu + div(a⊗u + u⊗a + u⊗u) + ∇p = f + div g`:
/// `p = -R(u⊗u) - R(a⊗u + u⊗a) + R(g) + Δ⁻¹ div f` with `R = Σ R_i R_j`
/// of symbol `k_i k_j/|k|²`. Mean zero.
pub fn pressure_from_velocity(
    u: &VectorField,
    a: Option<&VectorField>,
    g: Option<&TensorField>,
    f: Option<&VectorField>,
) -> Result<ScalarField> {
    let mut flux = outer(u, u)?;
    if let Some(a) = a {
        let au = outer(a, u)?;
        flux = flux.add(&au)?.add(&au.transpose())?;
    }
    if let Some(g) = g {
        flux = flux.axpy(-1.0, g)?;
    }
    let mut p = riesz_contract(&flux).scaled(-1.0);
    if let Some(f) = f {
        p = p.add(&inverse_laplacian(&divergence(f)))?;
    }
    Ok(p)
}

/// `‖Δp + div div(u⊗u + a⊗u + u⊗a - g) - div f‖_{L²}`.
pub fn pressure_residual(
    p: &ScalarField,
    u: &VectorField,
    a: Option<&VectorField>,
    g: Option<&TensorField>,
    f: Option<&VectorField>,
) -> Result<f64> {
    let grid = *u.grid();
    let mut flux = outer(u, u)?;
    if let Some(a) = a {
        let au = outer(a, u)?;
        flux = flux.add(&au)?.add(&au.transpose())?;
    }
    if let Some(g) = g {
        flux = flux.axpy(-1.0, g)?;
    }
    let mut res = ScalarField::zeros(grid);
    {
        let dst = res.coeffs_mut();
        for idx in 1..grid.spectral_len() {
            let k = grid.wavevector(idx);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let mut dd = num_complex::Complex64::new(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    dd -= flux.entry_coeffs(i, j)[idx] * (k[i] * k[j]);
                }
            }
            dst[idx] = -p.coeffs()[idx] * k2 + dd;
        }
    }
    if let Some(f) = f {
        res = res.add(&divergence(f).scaled(-1.0))?;
    }
    Ok(crate::spectral::l2_norm(&res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn shear_flow_has_no_pressure() {
        let g = Grid::periodic_2pi(16).unwrap();
        let u = VectorField::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]);
        let p = pressure_from_velocity(&u, None, None, None).unwrap();
        assert!(p.max_coeff() < 1e-16);
    }

    #[test]
    fn taylor_green_pressure() {
        let g = Grid::periodic_2pi(16).unwrap();
        let u = VectorField::from_fn(g, |x| {
            [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]
        });
        let p = pressure_from_velocity(&u, None, None, None).unwrap();
        let expect = ScalarField::from_fn(g, |x| ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) / 4.0);
        let err = p.coeffs().iter().zip(expect.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-15, "{err}");
        assert!(pressure_residual(&p, &u, None, None, None).unwrap() < 1e-12);
    }
}
