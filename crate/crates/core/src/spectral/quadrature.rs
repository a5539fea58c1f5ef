use super::grid::Grid;
use crate::error::{domain, Result};

/// Sparse quadrature rule over grid points: `∫ w(x) F(x) dx ≈ Σ weight_p F(x_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    entries: Vec<(usize, f64)>,
}

impl Stencil {
    /// Indicator of the closed ball `B_radius(center)` with fractional volumes
    /// for cells cut by the sphere (estimated with `sub³` sub-samples).
    pub fn ball(grid: &Grid, center: [f64; 3], radius: f64, sub: usize) -> Result<Self> {
        check_radius(grid, radius)?;
        let dx = grid.dx();
        let cell = grid.cell_volume();
        let half_diag = 0.5 * 3f64.sqrt() * dx;
        let sub = sub.max(1);
        let mut entries = Vec::new();
        for_points_near(grid, center, radius + half_diag, |p, d| {
            let dist = norm3(d);
            if dist <= radius - half_diag {
                entries.push((p, cell));
            } else if dist <= radius + half_diag {
                let mut inside = 0usize;
                for a in 0..sub {
                    for b in 0..sub {
                        for c in 0..sub {
                            let off = |s: usize| ((s as f64 + 0.5) / sub as f64 - 0.5) * dx;
                            let q = [d[0] + off(a), d[1] + off(b), d[2] + off(c)];
                            if norm3(q) <= radius {
                                inside += 1;
                            }
                        }
                    }
                }
                if inside > 0 {
                    entries.push((p, cell * inside as f64 / (sub * sub * sub) as f64));
                }
            }
        });
        if entries.is_empty() {
            return domain("ball region contains no grid cells");
        }
        Ok(Self { entries })
    }

    /// Smooth weight `profile(x - center)` sampled pointwise on all grid
    /// points with `|x - center| < support`.
    pub fn weighted(
        grid: &Grid,
        center: [f64; 3],
        support: f64,
        profile: impl Fn([f64; 3]) -> f64,
    ) -> Result<Self> {
        check_radius(grid, support)?;
        let cell = grid.cell_volume();
        let mut entries = Vec::new();
        for_points_near(grid, center, support, |p, d| {
            let w = profile(d);
            if w != 0.0 {
                entries.push((p, cell * w));
            }
        });
        Ok(Self { entries })
    }

    pub fn from_entries(entries: Vec<(usize, f64)>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// Sum of weights (measure of the region for indicators).
    pub fn measure(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.entries.iter().map(|&(p, w)| w * values[p]).sum()
    }

    pub fn integrate_with(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.entries.iter().map(|&(p, w)| w * f(p)).sum()
    }

    /// Largest `values[p]` over points carrying positive weight.
    pub fn max_of(&self, values: &[f64]) -> f64 {
        self.entries.iter().filter(|e| e.1 > 0.0).map(|&(p, _)| values[p]).fold(0.0, f64::max)
    }
}

/// Sliding-window integrals `y ↦ Σ_x w(x - y) F(x)` for all grid points `y`
/// at once, for a radially symmetric weight `w` given as a stencil centred
/// at the origin. Evaluated by FFT, so the cost does not depend on the
/// support of `w`.
#[derive(Debug, Clone)]
pub struct Convolver {
    grid: Grid,
    kernel: Vec<num_complex::Complex64>,
}

impl Convolver {
    pub fn new(grid: &Grid, origin_stencil: &Stencil) -> Self {
        let mut dense = vec![0.0; grid.physical_len()];
        for &(p, w) in origin_stencil.entries() {
            dense[p] += w;
        }
        let fft = super::fft::Fft3::get(grid.n());
        let scale = grid.physical_len() as f64;
        let kernel = fft.forward(&dense).into_iter().map(|c| c * scale).collect();
        Self { grid: *grid, kernel }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let fft = super::fft::Fft3::get(self.grid.n());
        let mut spec = fft.forward(values);
        spec.iter_mut().zip(&self.kernel).for_each(|(a, b)| *a *= b);
        fft.inverse(&spec)
    }
}

fn check_radius(grid: &Grid, radius: f64) -> Result<()> {
    if !(radius > 0.0) {
        return domain(format!("region radius {radius} must be positive"));
    }
    if radius >= 0.5 * grid.box_length() {
        return domain(format!(
            "region radius {radius} overlaps its periodic image (box {})",
            grid.box_length()
        ));
    }
    Ok(())
}

#[inline]
fn norm3(d: [f64; 3]) -> f64 {
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Visit grid points within the axis-aligned cube of half-width `reach`
/// around `center`, passing the flat index and the minimum-image offset.
pub(crate) fn for_points_near(grid: &Grid, center: [f64; 3], reach: f64, mut visit: impl FnMut(usize, [f64; 3])) {
    let n = grid.n() as i64;
    let dx = grid.dx();
    let span = ((reach / dx).ceil() as i64).min(n / 2);
    let base: Vec<i64> = center.iter().map(|c| (c / dx).round() as i64).collect();
    let lo = -span;
    let hi = if 2 * span >= n { n - span - 1 } else { span };
    for a in lo..=hi {
        for b in lo..=hi {
            for c in lo..=hi {
                let idx = [base[0] + a, base[1] + b, base[2] + c];
                let pos = [idx[0] as f64 * dx, idx[1] as f64 * dx, idx[2] as f64 * dx];
                let d = [pos[0] - center[0], pos[1] - center[1], pos[2] - center[2]];
                if d.iter().any(|x| x.abs() > reach) {
                    continue;
                }
                let w = |i: i64| i.rem_euclid(n) as usize;
                visit(grid.physical_index(w(idx[0]), w(idx[1]), w(idx[2])), d);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_measure_close_to_exact() {
        let g = Grid::periodic_2pi(32).unwrap();
        for &r in &[0.5, 1.0, 2.0] {
            let s = Stencil::ball(&g, [1.0, 2.0, 3.0], r, 6).unwrap();
            let exact = 4.0 / 3.0 * PI * r * r * r;
            assert!((s.measure() / exact - 1.0).abs() < 5e-3, "r={r}");
        }
    }

    #[test]
    fn ball_wraps_around_box() {
        let g = Grid::periodic_2pi(16).unwrap();
        let a = Stencil::ball(&g, [0.0, 0.0, 0.0], 1.0, 4).unwrap();
        let b = Stencil::ball(&g, [g.dx() * 5.0, g.dx() * 3.0, g.dx()], 1.0, 4).unwrap();
        assert!((a.measure() - b.measure()).abs() < 1e-12);
        assert!(Stencil::ball(&g, [0.0; 3], 4.0, 4).is_err());
    }

    #[test]
    fn convolver_matches_direct_stencil() {
        let g = Grid::periodic_2pi(16).unwrap();
        let f: Vec<f64> = (0..g.physical_len()).map(|i| ((i * 7919) % 13) as f64).collect();
        let origin = Stencil::ball(&g, [0.0; 3], 1.1, 4).unwrap();
        let conv = Convolver::new(&g, &origin).apply(&f);
        for &(ix, iy, iz) in &[(0, 0, 0), (3, 7, 15), (15, 1, 8)] {
            let c = g.position(ix, iy, iz);
            let direct = Stencil::ball(&g, c, 1.1, 4).unwrap().integrate(&f);
            assert!((conv[g.physical_index(ix, iy, iz)] - direct).abs() < 1e-9 * direct.abs().max(1.0));
        }
    }
}
