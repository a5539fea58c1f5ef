use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on the cube `[0, L)^3` with `n` points per axis.
///
/// Spectral coefficients use the real-to-complex layout: the two leading
/// axes (x, y) carry all `n` wavenumbers, the last axis (z) carries only
/// `0..=n/2`. The flat index of `(i, j, l)` is `(i * n + j) * (n/2 + 1) + l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::Grid(format!("n = {n} must be even and at least 8")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::Grid(format!("box length {box_length} must be positive")));
        }
        Ok(Self { n, box_length })
    }

    /// The `(2π)^3` box most scenarios live on.
    pub fn periodic_2pi(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Number of stored modes along z.
    pub fn nz(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn spectral_len(&self) -> usize {
        self.n * self.n * self.nz()
    }

    pub fn physical_len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Same box, `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> Grid {
        Grid { n: self.n * factor, box_length: self.box_length }
    }

    /// Same number of points, box scaled by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Grid> {
        Grid::new(self.n, self.box_length * factor)
    }

    /// Signed integer wavenumber along a full axis.
    #[inline]
    pub fn signed_mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Integer wavevector of flat spectral index `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let nz = self.nz();
        let l = idx % nz;
        let ij = idx / nz;
        let j = ij % self.n;
        let i = ij / self.n;
        [self.signed_mode(i), self.signed_mode(j), l as i64]
    }

    /// Physical wavevector `2π m / L` of flat spectral index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.mode(idx);
        let k0 = self.k0();
        [m[0] as f64 * k0, m[1] as f64 * k0, m[2] as f64 * k0]
    }

    #[inline]
    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    /// True when any component sits on the Nyquist index `n/2`.
    #[inline]
    pub fn is_nyquist(&self, m: [i64; 3]) -> bool {
        let half = (self.n / 2) as i64;
        m.iter().any(|c| c.abs() == half)
    }

    /// 2/3-rule mask: keep a mode iff `3|m_i| < n` on every axis.
    #[inline]
    pub fn dealias_keep(&self, m: [i64; 3]) -> bool {
        let n = self.n as i64;
        m.iter().all(|c| 3 * c.abs() < n)
    }

    /// Multiplicity of a stored mode in Parseval sums: modes with `0 < l < n/2`
    /// stand for themselves and their conjugate partner.
    #[inline]
    pub fn hermitian_weight(&self, idx: usize) -> f64 {
        let l = idx % self.nz();
        if l == 0 || l == self.n / 2 {
            1.0
        } else {
            2.0
        }
    }

    /// Flat index of the stored mode with integer wavevector `m`, if `m`
    /// (or its conjugate partner) is representable. The boolean is true when
    /// the conjugate partner is the one stored.
    pub fn index_of(&self, m: [i64; 3]) -> Option<(usize, bool)> {
        let half = (self.n / 2) as i64;
        let in_range = |c: i64| c >= -half && c < half || c == half;
        if !m.iter().all(|&c| in_range(c)) {
            return None;
        }
        let (m, conj) = if m[2] < 0 { ([-m[0], -m[1], -m[2]], true) } else { (m, false) };
        let wrap = |c: i64| -> usize { c.rem_euclid(self.n as i64) as usize };
        let l = m[2].min(half) as usize;
        Some(((wrap(m[0]) * self.n + wrap(m[1])) * self.nz() + l, conj))
    }

    /// Physical coordinates of grid point `(ix, iy, iz)`.
    #[inline]
    pub fn position(&self, ix: usize, iy: usize, iz: usize) -> [f64; 3] {
        let h = self.dx();
        [ix as f64 * h, iy as f64 * h, iz as f64 * h]
    }

    #[inline]
    pub fn physical_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    /// Minimum-image displacement `a - b` on the torus.
    #[inline]
    pub fn periodic_delta(&self, a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        let l = self.box_length;
        let mut d = [0.0; 3];
        for c in 0..3 {
            let mut x = a[c] - b[c];
            x -= l * (x / l).round();
            d[c] = x;
        }
        d
    }

    pub fn periodic_distance(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        let d = self.periodic_delta(a, b);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::Structure(format!(
                "grid mismatch: n={} L={} vs n={} L={}",
                self.n, self.box_length, other.n, other.box_length
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_odd_n() {
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(9, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, 1.0).is_ok());
    }

    #[test]
    fn index_roundtrip() {
        let g = Grid::periodic_2pi(8).unwrap();
        for idx in 0..g.spectral_len() {
            let m = g.mode(idx);
            let (back, conj) = g.index_of(m).unwrap();
            assert_eq!(back, idx);
            assert!(!conj);
        }
        let (idx, conj) = g.index_of([1, 2, -3]).unwrap();
        assert!(conj);
        assert_eq!(g.mode(idx), [-1, -2, 3]);
    }

    #[test]
    fn dealias_mask_is_two_thirds() {
        let g = Grid::periodic_2pi(32).unwrap();
        assert!(g.dealias_keep([10, -10, 10]));
        assert!(!g.dealias_keep([11, 0, 0]));
    }
}
