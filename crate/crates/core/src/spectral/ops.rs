use num_complex::Complex64;

use super::fft::Fft3;
use super::field::{ScalarField, SpectralField, TensorField, VectorField};
use super::grid::Grid;
use crate::error::{domain, Result};

#[inline]
fn i_times(c: Complex64, k: f64) -> Complex64 {
    Complex64::new(-c.im * k, c.re * k)
}

/// Derivative wavenumber along `axis`, zero on that axis' Nyquist index so
/// that odd multipliers keep real fields real.
#[inline]
pub fn derivative_wavenumber(grid: &Grid, idx: usize, axis: usize) -> f64 {
    let m = grid.mode(idx);
    if m[axis].unsigned_abs() as usize == grid.n() / 2 {
        0.0
    } else {
        m[axis] as f64 * grid.k0()
    }
}

/// Leray projection `I - k kᵀ/|k|²`, identity on the mean mode.
pub fn leray_project(w: &VectorField) -> VectorField {
    let mut out = w.clone();
    leray_project_in_place(&mut out);
    out
}

pub fn leray_project_in_place(w: &mut VectorField) {
    let grid = *w.grid();
    let [a, b, c] = w.comps_mut();
    for idx in 1..grid.spectral_len() {
        let k = grid.wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let dot = (a[idx] * k[0] + b[idx] * k[1] + c[idx] * k[2]) / k2;
        a[idx] -= dot * k[0];
        b[idx] -= dot * k[1];
        c[idx] -= dot * k[2];
    }
}

/// `e^{tΔ}` applied to every component.
pub fn heat_propagate<F: SpectralField>(w: &F, t: f64) -> Result<F> {
    if !(t >= 0.0) {
        return domain(format!("heat propagation time {t} must be nonnegative"));
    }
    let grid = *w.grid();
    Ok(w.with_multiplier(|idx| (-grid.k_squared(idx) * t).exp()))
}

/// Tensor `(∇w)_{ij} = ∂_i w_j`.
pub fn gradient(w: &VectorField) -> TensorField {
    let grid = *w.grid();
    let len = grid.spectral_len();
    let mut out = TensorField::zeros(grid);
    for i in 0..3 {
        for j in 0..3 {
            let src = &w.comps()[j];
            let dst = out.entry_coeffs_mut(i, j);
            for idx in 0..len {
                dst[idx] = i_times(src[idx], derivative_wavenumber(&grid, idx, i));
            }
        }
    }
    out
}

pub fn scalar_gradient(s: &ScalarField) -> VectorField {
    let grid = *s.grid();
    let len = grid.spectral_len();
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    for (i, comp) in comps.iter_mut().enumerate() {
        *comp = (0..len)
            .map(|idx| i_times(s.coeffs()[idx], derivative_wavenumber(&grid, idx, i)))
            .collect();
    }
    VectorField::from_coeffs(grid, comps).expect("lengths match by construction")
}

pub fn divergence(w: &VectorField) -> ScalarField {
    let grid = *w.grid();
    let mut out = ScalarField::zeros(grid);
    let dst = out.coeffs_mut();
    for (i, comp) in w.comps().iter().enumerate() {
        for (idx, c) in comp.iter().enumerate() {
            dst[idx] += i_times(*c, derivative_wavenumber(&grid, idx, i));
        }
    }
    out
}

/// Row divergence `(div g)_i = ∂_j g_{ij}`.
pub fn tensor_divergence(g: &TensorField) -> VectorField {
    let grid = *g.grid();
    let mut out = VectorField::zeros(grid);
    for i in 0..3 {
        let dst = &mut out.comps_mut()[i];
        for j in 0..3 {
            for (idx, c) in g.entry_coeffs(i, j).iter().enumerate() {
                dst[idx] += i_times(*c, derivative_wavenumber(&grid, idx, j));
            }
        }
    }
    out
}

/// `ℙ div g`.
pub fn projected_divergence(g: &TensorField) -> VectorField {
    let mut out = tensor_divergence(g);
    leray_project_in_place(&mut out);
    out
}

/// Riesz composition `R_i R_j` with symbol `k_i k_j / |k|²`, mean mode zeroed.
pub fn riesz_tensor(s: &ScalarField, i: usize, j: usize) -> ScalarField {
    let grid = *s.grid();
    s.with_multiplier(|idx| riesz_symbol(&grid, idx, i, j))
}

#[inline]
pub fn riesz_symbol(grid: &Grid, idx: usize, i: usize, j: usize) -> f64 {
    if idx == 0 {
        return 0.0;
    }
    let k = grid.wavevector(idx);
    k[i] * k[j] / (k[0] * k[0] + k[1] * k[1] + k[2] * k[2])
}

/// `Σ_{ij} R_i R_j g_{ij}`.
pub fn riesz_contract(g: &TensorField) -> ScalarField {
    let grid = *g.grid();
    let mut out = ScalarField::zeros(grid);
    let dst = out.coeffs_mut();
    for idx in 1..grid.spectral_len() {
        let k = grid.wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += g.entry_coeffs(i, j)[idx] * (k[i] * k[j]);
            }
        }
        dst[idx] = acc / k2;
    }
    out
}

pub fn laplacian<F: SpectralField>(w: &F) -> F {
    let grid = *w.grid();
    w.with_multiplier(|idx| -grid.k_squared(idx))
}

/// `Δ⁻¹` with the mean mode sent to zero.
pub fn inverse_laplacian<F: SpectralField>(w: &F) -> F {
    let grid = *w.grid();
    w.with_multiplier(|idx| if idx == 0 { 0.0 } else { -1.0 / grid.k_squared(idx) })
}

/// Zero every mode outside the 2/3 mask.
pub fn dealias<F: SpectralField>(w: &mut F) {
    let grid = *w.grid();
    w.apply_multiplier(|idx| if grid.dealias_keep(grid.mode(idx)) { 1.0 } else { 0.0 });
}

pub fn dealiased<F: SpectralField>(w: &F) -> F {
    let mut out = w.clone();
    dealias(&mut out);
    out
}

/// Dealiased physical samples of the three components.
pub(crate) fn dealiased_physical(w: &VectorField) -> [Vec<f64>; 3] {
    dealiased(w).to_physical()
}

/// Dealiased outer product `u ⊗ v`, entry `(i, j) = u_i v_j`.
pub fn outer(u: &VectorField, v: &VectorField) -> Result<TensorField> {
    u.grid().check_same(v.grid())?;
    let pu = dealiased_physical(u);
    let pv = if std::ptr::eq(u, v) { pu.clone() } else { dealiased_physical(v) };
    Ok(outer_from_physical(*u.grid(), &pu, &pv))
}

pub(crate) fn outer_from_physical(grid: Grid, pu: &[Vec<f64>; 3], pv: &[Vec<f64>; 3]) -> TensorField {
    let fft = Fft3::get(grid.n());
    let mut comps = Vec::with_capacity(9);
    let mut prod = vec![0.0; grid.physical_len()];
    for i in 0..3 {
        for j in 0..3 {
            prod.iter_mut()
                .zip(pu[i].iter().zip(&pv[j]))
                .for_each(|(p, (a, b))| *p = a * b);
            comps.push(fft.forward(&prod));
        }
    }
    let mut out = TensorField::from_coeffs(grid, comps).expect("lengths match by construction");
    dealias(&mut out);
    out
}

/// `(u·∇) v` with dealiased products, component `i = Σ_j u_j ∂_j v_i`.
pub fn advection(u: &VectorField, v: &VectorField) -> Result<VectorField> {
    u.grid().check_same(v.grid())?;
    let grid = *u.grid();
    let pu = dealiased_physical(u);
    let grad = dealiased(&gradient(v)).physical_components();
    let mut out = [
        vec![0.0; grid.physical_len()],
        vec![0.0; grid.physical_len()],
        vec![0.0; grid.physical_len()],
    ];
    for i in 0..3 {
        for j in 0..3 {
            let g = &grad[3 * j + i];
            out[i].iter_mut().zip(pu[j].iter().zip(g)).for_each(|(o, (a, b))| *o += a * b);
        }
    }
    let mut w = VectorField::from_physical(grid, &out);
    dealias(&mut w);
    Ok(w)
}

/// Largest per-mode `|k·ŵ(k)|` relative to the largest coefficient.
pub fn divergence_defect(w: &VectorField) -> f64 {
    let grid = *w.grid();
    let scale = w.max_coeff().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for idx in 1..grid.spectral_len() {
        let k = grid.wavevector(idx);
        let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        let d = (0..3).map(|c| w.comps()[c][idx] * k[c]).sum::<Complex64>().norm() / kn;
        worst = worst.max(d);
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::norm::l2_norm;

    fn g32() -> Grid {
        Grid::periodic_2pi(16).unwrap()
    }

    fn max_diff(a: &VectorField, b: &VectorField) -> f64 {
        a.comps()
            .iter()
            .zip(b.comps())
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn leray_examples() {
        let g = g32();
        let grad = VectorField::from_fn(g, |x| [x[0].sin(), 0.0, 0.0]);
        assert!(leray_project(&grad).max_coeff() < 1e-15);
        let free = VectorField::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]);
        assert!(max_diff(&leray_project(&free), &free) < 1e-15);
        let mixed = VectorField::from_fn(g, |x| [x[0].sin() + x[1].sin(), 0.0, 0.0]);
        assert!(max_diff(&leray_project(&mixed), &free) < 1e-15);
    }

    #[test]
    fn heat_examples() {
        let g = g32();
        let w = VectorField::from_fn(g, |x| [0.0, x[0].cos(), 0.0]);
        let h = heat_propagate(&w, 0.5).unwrap();
        let (idx, _) = g.index_of([1, 0, 0]).unwrap();
        assert!((h.comps()[1][idx].re - 0.5 * (-0.5f64).exp()).abs() < 1e-15);
        assert!(heat_propagate(&w, -1.0).is_err());
        assert_eq!(heat_propagate(&w, 0.0).unwrap(), w);
    }

    #[test]
    fn gradient_examples() {
        let g = g32();
        let w = VectorField::from_fn(g, |x| [x[0].sin(), 0.0, 0.0]);
        let grad = gradient(&w);
        let expect = ScalarField::from_fn(g, |x| x[0].cos());
        for i in 0..3 {
            for j in 0..3 {
                let e = grad.entry(i, j);
                let target = if (i, j) == (0, 0) { expect.coeffs().to_vec() } else { vec![Complex64::new(0.0, 0.0); g.spectral_len()] };
                let err = e.coeffs().iter().zip(&target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-15, "({i},{j}) err {err}");
            }
        }
        let w = VectorField::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]);
        assert!((l2_norm(&gradient(&w)) - l2_norm(&w)).abs() < 1e-12);
    }

    #[test]
    fn riesz_examples() {
        let g = g32();
        let s = ScalarField::from_fn(g, |x| (2.0 * x[1]).cos());
        assert!(riesz_tensor(&s, 0, 0).max_coeff() < 1e-16);
        let s = ScalarField::from_fn(g, |x| (2.0 * x[0]).cos());
        let r = riesz_tensor(&s, 0, 0);
        let err = r.coeffs().iter().zip(s.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-15);
    }

    #[test]
    fn outer_matches_pointwise_product() {
        let g = g32();
        let u = VectorField::from_fn(g, |x| [x[1].sin(), x[2].cos(), 0.0]);
        let t = outer(&u, &u).unwrap();
        let phys = t.physical_components();
        for ix in 0..g.n() {
            for iy in 0..g.n() {
                let x = g.position(ix, iy, 3);
                let p = g.physical_index(ix, iy, 3);
                assert!((phys[0][p] - x[1].sin().powi(2)).abs() < 1e-13);
                assert!((phys[1] [p] - x[1].sin() * x[2].cos()).abs() < 1e-13);
            }
        }
    }
}
