//! Discrete Duhamel operators `F f = ∫₀ᵗ e^{(t-s)Δ} ℙ f(s) ds`,
//! `G g = F(div g)` and `B(u, v) = -G(u ⊗ v)`.

use super::integrator::EtdCoefficients;
use crate::error::{Error, Result};
use crate::spectral::ops::{leray_project, outer, tensor_divergence};
use crate::spectral::{Grid, SpectralField, TensorField, VectorField};

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Ok(0.0);
    }
    let h = times[1] - times[0];
    if !(h > 0.0) {
        return Err(Error::Structure("time grid must be increasing".into()));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(w[1].abs()) {
            return Err(Error::Structure("time grid must be uniform".into()));
        }
    }
    Ok(h)
}

/// Streaming form of `F f`: feed the source at consecutive time levels
/// `h` apart and read `F f` at the latest level.
#[derive(Debug, Clone)]
pub struct DuhamelAccumulator {
    co: EtdCoefficients,
    last: Option<VectorField>,
    value: VectorField,
}

impl DuhamelAccumulator {
    pub fn new(grid: &Grid, h: f64) -> Self {
        Self { co: EtdCoefficients::new(grid, h), last: None, value: VectorField::zeros(*grid) }
    }

    /// Push `f` at the next time level; the source is Leray-projected here.
    pub fn push(&mut self, f: &VectorField) -> Result<&VectorField> {
        f.grid().check_same(self.value.grid())?;
        let pf = leray_project(f);
        if let Some(prev) = &self.last {
            let mut next = VectorField::zeros(*self.value.grid());
            for c in 0..3 {
                let (a, b, p) = (&prev.comps()[c], &pf.comps()[c], &self.value.comps()[c]);
                let dst = &mut next.comps_mut()[c];
                for idx in 0..dst.len() {
                    let w_new = self.co.phi2[idx];
                    let w_old = self.co.phi1[idx] - w_new;
                    dst[idx] = p[idx] * self.co.decay[idx] + a[idx] * w_old + b[idx] * w_new;
                }
            }
            self.value = next;
        }
        self.last = Some(pf);
        Ok(&self.value)
    }

    pub fn value(&self) -> &VectorField {
        &self.value
    }
}

/// `F f` on the sample times, with the linear part integrated exactly and the
/// source interpolated linearly within each step.
pub fn duhamel_f(f: &[VectorField], times: &[f64]) -> Result<Vec<VectorField>> {
    if f.len() != times.len() {
        return Err(Error::Structure("source series and time grid differ in length".into()));
    }
    let Some(first) = f.first() else {
        return Ok(Vec::new());
    };
    let grid = *first.grid();
    let h = uniform_step(times)?;
    let mut acc = DuhamelAccumulator::new(&grid, if h > 0.0 { h } else { 1.0 });
    f.iter().zip(times).map(|(fi, &t)| Ok(acc.push(fi)?.clone().with_time(t))).collect()
}

/// `G g = F(div g)`.
pub fn duhamel_g(g: &[TensorField], times: &[f64]) -> Result<Vec<VectorField>> {
    let div: Vec<VectorField> = g.iter().map(tensor_divergence).collect();
    duhamel_f(&div, times)
}

/// `B(u, v) = -G(u ⊗ v)` with dealiased products.
pub fn bilinear_b(u: &[VectorField], v: &[VectorField], times: &[f64]) -> Result<Vec<VectorField>> {
    if u.len() != v.len() {
        return Err(Error::Structure("series lengths differ".into()));
    }
    let uv = u.iter().zip(v).map(|(a, b)| outer(a, b)).collect::<Result<Vec<_>>>()?;
    Ok(duhamel_g(&uv, times)?.into_iter().map(|w| w.scaled(-1.0).with_time(w.time())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn constant_source_closed_form() {
        let g = Grid::periodic_2pi(8).unwrap();
        let f = VectorField::from_fn(g, |x| [0.0, x[0].cos(), 0.0]);
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let series = vec![f.clone(); times.len()];
        let out = duhamel_f(&series, &times).unwrap();
        let (idx, _) = g.index_of([1, 0, 0]).unwrap();
        for (w, &t) in out.iter().zip(&times) {
            let expect = 0.5 * (1.0 - (-t).exp());
            assert!((w.comps()[1][idx].re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_nonuniform_grid() {
        let g = Grid::periodic_2pi(8).unwrap();
        let series = vec![VectorField::zeros(g); 3];
        assert!(duhamel_f(&series, &[0.0, 0.1, 0.3]).is_err());
    }
}
