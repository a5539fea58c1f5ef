use num_complex::Complex64;

use super::fft::Fft3;
use super::grid::Grid;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Common view over scalar, vector and tensor fields stored as Fourier
/// coefficients on the same [`Grid`].
pub trait SpectralField: Clone {
    fn grid(&self) -> &Grid;
    fn components(&self) -> &[Vec<Complex64>];
    fn components_mut(&mut self) -> &mut [Vec<Complex64>];

    /// Multiply every mode of every component by `symbol(idx)`.
    fn apply_multiplier(&mut self, symbol: impl Fn(usize) -> f64) {
        let len = self.grid().spectral_len();
        let table: Vec<f64> = (0..len).map(symbol).collect();
        for comp in self.components_mut() {
            for (c, s) in comp.iter_mut().zip(&table) {
                *c *= *s;
            }
        }
    }

    fn with_multiplier(&self, symbol: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        out.apply_multiplier(symbol);
        out
    }

    /// Physical samples of every component on the native grid.
    fn physical_components(&self) -> Vec<Vec<f64>> {
        let fft = Fft3::get(self.grid().n());
        self.components().iter().map(|c| fft.inverse(c)).collect()
    }

    /// Physical samples on a grid refined by `factor` (trigonometric
    /// interpolation by zero padding).
    fn padded_components(&self, factor: usize) -> Vec<Vec<f64>> {
        let fine = self.grid().refined(factor);
        let fft = Fft3::get(fine.n());
        self.components()
            .iter()
            .map(|c| fft.inverse(&resample_coeffs(self.grid(), &fine, c)))
            .collect()
    }

    /// Pointwise Euclidean (Frobenius for tensors) magnitude on the native grid.
    fn magnitude(&self) -> Vec<f64> {
        pointwise_magnitude(&self.physical_components())
    }

    fn magnitude_padded(&self, factor: usize) -> Vec<f64> {
        pointwise_magnitude(&self.padded_components(factor))
    }

    /// Largest coefficient modulus, used for relative tolerances.
    fn max_coeff(&self) -> f64 {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// True when every coefficient is finite.
    fn is_finite(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

pub(crate) fn pointwise_magnitude(comps: &[Vec<f64>]) -> Vec<f64> {
    let len = comps[0].len();
    (0..len)
        .map(|p| comps.iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt())
        .collect()
}

/// Copy coefficients between two grids over the same box, padding with zeros
/// or truncating. Nyquist coefficients are split evenly between the `±n/2`
/// partners when refining and dropped when coarsening.
pub fn resample_coeffs(from: &Grid, to: &Grid, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; to.spectral_len()];
    if from.n() == to.n() {
        out.copy_from_slice(coeffs);
        return out;
    }
    let refining = to.n() > from.n();
    let half = (from.n() / 2) as i64;
    for (idx, &c) in coeffs.iter().enumerate() {
        if c == ZERO {
            continue;
        }
        let m = from.mode(idx);
        if !refining {
            if to.is_nyquist(m) || m.iter().any(|x| x.abs() > (to.n() / 2) as i64) {
                continue;
            }
            if let Some((j, conj)) = to.index_of(m) {
                out[j] = if conj { c.conj() } else { c };
            }
            continue;
        }
        // Enumerate the ±n/2 images of Nyquist components on x and y.
        let xs: Vec<i64> = if m[0] == -half { vec![-half, half] } else { vec![m[0]] };
        let ys: Vec<i64> = if m[1] == -half { vec![-half, half] } else { vec![m[1]] };
        let mut weight = 1.0 / (xs.len() * ys.len()) as f64;
        if m[2] == half {
            weight *= 0.5;
        }
        for &mx in &xs {
            for &my in &ys {
                if let Some((j, conj)) = to.index_of([mx, my, m[2]]) {
                    let v = c * weight;
                    out[j] += if conj { v.conj() } else { v };
                }
            }
        }
    }
    out
}

/// Real scalar field (pressure, vorticity magnitude, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self { coeffs: vec![ZERO; grid.spectral_len()], grid }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.spectral_len() {
            return Err(Error::Structure(format!(
                "expected {} coefficients, got {}",
                grid.spectral_len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn from_physical(grid: Grid, values: &[f64]) -> Self {
        let coeffs = Fft3::get(grid.n()).forward(values);
        Self { grid, coeffs }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let n = grid.n();
        let mut values = vec![0.0; grid.physical_len()];
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    values[grid.physical_index(ix, iy, iz)] = f(grid.position(ix, iy, iz));
                }
            }
        }
        Self::from_physical(grid, &values)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn to_physical(&self) -> Vec<f64> {
        Fft3::get(self.grid.n()).inverse(&self.coeffs)
    }

    /// Spatial mean, i.e. the `k = 0` amplitude.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        out.coeffs.iter_mut().zip(&other.coeffs).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn resampled(&self, to: Grid) -> Result<Self> {
        same_box(&self.grid, &to)?;
        Ok(Self { coeffs: resample_coeffs(&self.grid, &to, &self.coeffs), grid: to })
    }
}

impl SpectralField for ScalarField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn components(&self) -> &[Vec<Complex64>] {
        std::slice::from_ref(&self.coeffs)
    }
    fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        std::slice::from_mut(&mut self.coeffs)
    }
}

/// Three-component vector field with a time tag. Velocity fields (`u`,
/// `u_ε`, `v = u - u_ε`, initial data) are divergence-free instances.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    comps: [Vec<Complex64>; 3],
    time: f64,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![ZERO; grid.spectral_len()];
        Self { comps: [z.clone(), z.clone(), z], grid, time: 0.0 }
    }

    pub fn from_components(parts: [ScalarField; 3]) -> Result<Self> {
        let grid = parts[0].grid;
        parts[1].grid.check_same(&grid)?;
        parts[2].grid.check_same(&grid)?;
        let [a, b, c] = parts;
        Ok(Self { grid, comps: [a.coeffs, b.coeffs, c.coeffs], time: 0.0 })
    }

    pub fn from_coeffs(grid: Grid, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.spectral_len()) {
            return Err(Error::Structure("component length does not match grid".into()));
        }
        Ok(Self { grid, comps, time: 0.0 })
    }

    pub fn from_physical(grid: Grid, values: &[Vec<f64>; 3]) -> Self {
        let fft = Fft3::get(grid.n());
        let comps = [fft.forward(&values[0]), fft.forward(&values[1]), fft.forward(&values[2])];
        Self { grid, comps, time: 0.0 }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let n = grid.n();
        let mut values = [
            vec![0.0; grid.physical_len()],
            vec![0.0; grid.physical_len()],
            vec![0.0; grid.physical_len()],
        ];
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    let p = grid.physical_index(ix, iy, iz);
                    let v = f(grid.position(ix, iy, iz));
                    for c in 0..3 {
                        values[c][p] = v[c];
                    }
                }
            }
        }
        Self::from_physical(grid, &values)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn component(&self, c: usize) -> ScalarField {
        ScalarField { grid: self.grid, coeffs: self.comps[c].clone() }
    }

    pub fn comps(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn comps_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.comps
    }

    pub fn to_physical(&self) -> [Vec<f64>; 3] {
        let fft = Fft3::get(self.grid.n());
        [fft.inverse(&self.comps[0]), fft.inverse(&self.comps[1]), fft.inverse(&self.comps[2])]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        for (dst, src) in out.comps.iter_mut().zip(&other.comps) {
            dst.iter_mut().zip(src).for_each(|(x, y)| *x += y * a);
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for comp in out.comps.iter_mut() {
            comp.iter_mut().for_each(|c| *c *= s);
        }
        out
    }

    pub fn resampled(&self, to: Grid) -> Result<Self> {
        same_box(&self.grid, &to)?;
        let comps = [
            resample_coeffs(&self.grid, &to, &self.comps[0]),
            resample_coeffs(&self.grid, &to, &self.comps[1]),
            resample_coeffs(&self.grid, &to, &self.comps[2]),
        ];
        Ok(Self { grid: to, comps, time: self.time })
    }

    /// Reinterpret the coefficients on a box scaled by `1/lambda`, multiplying
    /// amplitudes by `lambda`: the field `λ w(λ x)` of the parabolic scaling.
    pub fn parabolic_rescale(&self, lambda: f64) -> Result<Self> {
        let grid = self.grid.rescaled(1.0 / lambda)?;
        let mut out = self.scaled(lambda);
        out.grid = grid;
        out.time = self.time / (lambda * lambda);
        Ok(out)
    }
}

impl SpectralField for VectorField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }
    fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }
}

/// Rank-two tensor field, component `(i, j)` stored at `3 * i + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    grid: Grid,
    comps: Vec<Vec<Complex64>>,
}

impl TensorField {
    pub fn zeros(grid: Grid) -> Self {
        Self { comps: vec![vec![ZERO; grid.spectral_len()]; 9], grid }
    }

    pub fn from_coeffs(grid: Grid, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != 9 || comps.iter().any(|c| c.len() != grid.spectral_len()) {
            return Err(Error::Structure("tensor needs 9 components matching the grid".into()));
        }
        Ok(Self { grid, comps })
    }

    pub fn from_physical(grid: Grid, values: &[Vec<f64>]) -> Result<Self> {
        if values.len() != 9 {
            return Err(Error::Structure("tensor needs 9 physical components".into()));
        }
        let fft = Fft3::get(grid.n());
        Ok(Self { grid, comps: values.iter().map(|v| fft.forward(v)).collect() })
    }

    pub fn entry(&self, i: usize, j: usize) -> ScalarField {
        ScalarField { grid: self.grid, coeffs: self.comps[3 * i + j].clone() }
    }

    pub fn entry_coeffs(&self, i: usize, j: usize) -> &[Complex64] {
        &self.comps[3 * i + j]
    }

    pub fn entry_coeffs_mut(&mut self, i: usize, j: usize) -> &mut Vec<Complex64> {
        &mut self.comps[3 * i + j]
    }

    pub fn transpose(&self) -> Self {
        let mut comps = Vec::with_capacity(9);
        for i in 0..3 {
            for j in 0..3 {
                comps.push(self.comps[3 * j + i].clone());
            }
        }
        Self { grid: self.grid, comps }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        for (dst, src) in out.comps.iter_mut().zip(&other.comps) {
            dst.iter_mut().zip(src).for_each(|(x, y)| *x += y * a);
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for comp in out.comps.iter_mut() {
            comp.iter_mut().for_each(|c| *c *= s);
        }
        out
    }

    pub fn resampled(&self, to: Grid) -> Result<Self> {
        same_box(&self.grid, &to)?;
        let comps = self.comps.iter().map(|c| resample_coeffs(&self.grid, &to, c)).collect();
        Ok(Self { grid: to, comps })
    }

    pub fn parabolic_rescale(&self, factor: f64, lambda: f64) -> Result<Self> {
        let grid = self.grid.rescaled(1.0 / lambda)?;
        let mut out = self.scaled(factor);
        out.grid = grid;
        Ok(out)
    }
}

impl SpectralField for TensorField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }
    fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }
}

fn same_box(a: &Grid, b: &Grid) -> Result<()> {
    if (a.box_length() - b.box_length()).abs() > 1e-12 * a.box_length() {
        return Err(Error::Structure("resampling requires the same box length".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padded_evaluation_reproduces_trig_polynomial() {
        let g = Grid::periodic_2pi(8).unwrap();
        let f = |x: [f64; 3]| (x[0]).sin() * (2.0 * x[1]).cos() + (3.0 * x[2]).sin();
        let s = ScalarField::from_fn(g, f);
        let fine = s.padded_components(2).remove(0);
        let gf = g.refined(2);
        let n = gf.n();
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    let p = gf.physical_index(ix, iy, iz);
                    assert!((fine[p] - f(gf.position(ix, iy, iz))).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn nyquist_split_keeps_grid_values() {
        // cos(4x) on n=8 lives on the Nyquist index; padding must keep the
        // interpolant real and equal at the original nodes.
        let g = Grid::periodic_2pi(8).unwrap();
        let s = ScalarField::from_fn(g, |x| (4.0 * x[0]).cos() + (4.0 * x[2]).cos());
        let coarse = s.to_physical();
        let fine = s.padded_components(2).remove(0);
        let gf = g.refined(2);
        for ix in 0..8 {
            for iy in 0..8 {
                for iz in 0..8 {
                    let a = coarse[g.physical_index(ix, iy, iz)];
                    let b = fine[gf.physical_index(2 * ix, 2 * iy, 2 * iz)];
                    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
                }
            }
        }
    }
}
