use crate::error::{domain, Result};
use crate::spectral::quadrature::for_points_near;
use crate::spectral::{Grid, Stencil};

fn kernel(x: f64) -> [f64; 3] {
    // f(x) = exp(-1/x) and its first two derivatives.
    if x <= 0.0 {
        return [0.0; 3];
    }
    let f = (-1.0 / x).exp();
    let x2 = x * x;
    [f, f / x2, f * (1.0 / (x2 * x2) - 2.0 / (x2 * x))]
}

/// Smooth step `S(x) = f(x)/(f(x) + f(1-x))` with `S'` and `S''`.
fn smoothstep_derivatives(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0; 3];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let [a, a1, a2] = kernel(x);
    let [b0, b1, b2] = kernel(1.0 - x);
    // d/dx f(1 - x) = -f'(1 - x)
    let (b, bd, bdd) = (b0, -b1, b2);
    let d = a + b;
    let num = a1 * b - a * bd;
    let num_d = a2 * b - a * bdd;
    let d_d = a1 + bd;
    [a / d, num / (d * d), (num_d * d - 2.0 * num * d_d) / (d * d * d)]
}

/// Radial profile `P(ρ) = S(2 - ρ)` of the unit bump: 1 on `[0, 1]`, 0 on
/// `[2, ∞)`. Returns `(P, P', P'')`.
pub fn radial_profile(rho: f64) -> [f64; 3] {
    let [s, s1, s2] = smoothstep_derivatives(2.0 - rho);
    [s, -s1, s2]
}

/// `max |P'|`, so that `max |∇φ_r| · r` equals this constant for every `r`.
pub fn gradient_constant() -> f64 {
    (0..=4000).map(|i| radial_profile(1.0 + i as f64 / 4000.0)[1].abs()).fold(0.0, f64::max)
}

/// `max(|P''|, |P'|/ρ)`, the largest Hessian eigenvalue times `r²`.
pub fn hessian_constant() -> f64 {
    (0..=4000)
        .map(|i| {
            let rho = 1.0 + i as f64 / 4000.0;
            let [_, p1, p2] = radial_profile(rho);
            p2.abs().max(p1.abs() / rho)
        })
        .fold(0.0, f64::max)
}

/// Sampled cut-off `φ_{r,y}(x) = φ₁((x - y)/r)` with its gradient and
/// Laplacian on the grid points of its support.
#[derive(Debug, Clone)]
pub struct BumpFunction {
    pub r: f64,
    pub center: [f64; 3],
    /// `(index, φ, ∇φ, Δφ)` for every grid point with `|x - y| < 2r`.
    pub samples: Vec<(usize, f64, [f64; 3], f64)>,
    pub c_bump: f64,
    pub c_bump2: f64,
}

impl BumpFunction {
    pub fn new(r: f64, center: [f64; 3], grid: &Grid) -> Result<Self> {
        if !(r > 0.0) {
            return domain(format!("bump radius {r} must be positive"));
        }
        if 2.0 * r >= 0.5 * grid.box_length() {
            return domain(format!(
                "bump support 2r = {} overlaps its periodic image (box {})",
                2.0 * r,
                grid.box_length()
            ));
        }
        let mut samples = Vec::new();
        for_points_near(grid, center, 2.0 * r, |p, d| {
            let dist = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let rho = dist / r;
            if rho >= 2.0 {
                return;
            }
            let [val, p1, p2] = radial_profile(rho);
            let grad = if dist > 0.0 { [p1 / r * d[0] / dist, p1 / r * d[1] / dist, p1 / r * d[2] / dist] } else { [0.0; 3] };
            let lap = if rho > 0.0 { (p2 + 2.0 * p1 / rho) / (r * r) } else { 0.0 };
            samples.push((p, val, grad, lap));
        });
        Ok(Self { r, center, samples, c_bump: gradient_constant(), c_bump2: hessian_constant() })
    }

    pub fn value_stencil(&self, grid: &Grid) -> Stencil {
        let cell = grid.cell_volume();
        Stencil::from_entries(self.samples.iter().map(|s| (s.0, cell * s.1)).collect())
    }

    /// `∫ φ dx` by grid quadrature.
    pub fn mass(&self, grid: &Grid) -> f64 {
        self.value_stencil(grid).measure()
    }

    pub fn max_gradient(&self) -> f64 {
        self.samples.iter().map(|s| (s.2[0] * s.2[0] + s.2[1] * s.2[1] + s.2[2] * s.2[2]).sqrt()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_derivatives_match_differences() {
        for &rho in &[1.1, 1.4, 1.5, 1.77, 1.95] {
            let h = 1e-5;
            let [_, p1, p2] = radial_profile(rho);
            let fd1 = (radial_profile(rho + h)[0] - radial_profile(rho - h)[0]) / (2.0 * h);
            let fd2 = (radial_profile(rho + h)[1] - radial_profile(rho - h)[1]) / (2.0 * h);
            assert!((p1 - fd1).abs() < 1e-7, "rho {rho}");
            assert!((p2 - fd2).abs() < 1e-6, "rho {rho}");
        }
        assert_eq!(radial_profile(0.5), [1.0, 0.0, 0.0]);
        assert_eq!(radial_profile(2.5), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn bump_invariants_across_scales() {
        let g = Grid::periodic_2pi(64).unwrap();
        for &r in &[0.1, 0.5, 1.0] {
            let b = BumpFunction::new(r, [1.0, 2.0, 3.0], &g).unwrap();
            assert!(b.samples.iter().all(|s| (0.0..=1.0).contains(&s.1)));
            assert!(b.max_gradient() * r <= b.c_bump * (1.0 + 1e-12));
        }
        assert!(BumpFunction::new(1.6, [0.0; 3], &g).is_err());
    }
}
