use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::spectral::{Grid, Stencil};

/// Candidate centres `y` for the supremum over `ℝ³`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterSet {
    /// Every `stride`-th grid point along each axis.
    Stride(usize),
    /// Explicit flat grid indices.
    Indices(Vec<usize>),
}

impl Default for CenterSet {
    fn default() -> Self {
        CenterSet::Stride(2)
    }
}

impl CenterSet {
    pub fn indices(&self, grid: &Grid) -> Result<Vec<usize>> {
        let n = grid.n();
        let out: Vec<usize> = match self {
            CenterSet::Stride(s) => {
                if *s == 0 {
                    return domain("center stride must be positive");
                }
                let mut v = Vec::new();
                for i in (0..n).step_by(*s) {
                    for j in (0..n).step_by(*s) {
                        for k in (0..n).step_by(*s) {
                            v.push(grid.physical_index(i, j, k));
                        }
                    }
                }
                v
            }
            CenterSet::Indices(v) => {
                if let Some(bad) = v.iter().find(|&&p| p >= grid.physical_len()) {
                    return domain(format!("center index {bad} outside the grid"));
                }
                v.clone()
            }
        };
        if out.is_empty() {
            return domain("empty center set");
        }
        Ok(out)
    }
}

pub(crate) fn point_of(grid: &Grid, p: usize) -> [f64; 3] {
    let n = grid.n();
    grid.position(p / (n * n), (p / n) % n, p % n)
}

/// Running time integral `∫_0^t F(y, s) ds` (trapezoid rule) of several
/// per-centre channels, with snapshots at requested times.
#[derive(Debug, Clone)]
pub(crate) struct Accumulator {
    cum: Vec<Vec<f64>>,
    prev: Option<(f64, Vec<Vec<f64>>)>,
}

impl Accumulator {
    pub fn new(channels: usize, len: usize) -> Self {
        Self { cum: vec![vec![0.0; len]; channels], prev: None }
    }

    pub fn push(&mut self, t: f64, values: Vec<Vec<f64>>) -> Result<()> {
        if let Some((t0, old)) = &self.prev {
            let dt = t - t0;
            if !(dt > 0.0) {
                return domain(format!("sample times must increase ({t0} then {t})"));
            }
            for (acc, (a, b)) in self.cum.iter_mut().zip(old.iter().zip(&values)) {
                for p in 0..acc.len() {
                    acc[p] += 0.5 * dt * (a[p] + b[p]);
                }
            }
        }
        self.prev = Some((t, values));
        Ok(())
    }

    pub fn current(&self) -> &[Vec<f64>] {
        &self.cum
    }
}

/// Per-centre integrals `∫_a^b F(y, s) ds` over a list of time intervals,
/// fed one sample at a time. Interval endpoints must coincide with sample
/// times.
#[derive(Debug, Clone)]
pub(crate) struct IntervalIntegrals {
    acc: Accumulator,
    intervals: Vec<(f64, f64)>,
    base: Vec<Option<Vec<Vec<f64>>>>,
    done: Vec<Option<Vec<Vec<f64>>>>,
    tol: f64,
}

impl IntervalIntegrals {
    pub fn new(channels: usize, len: usize, intervals: Vec<(f64, f64)>, tol: f64) -> Self {
        let m = intervals.len();
        Self { acc: Accumulator::new(channels, len), intervals, base: vec![None; m], done: vec![None; m], tol }
    }

    pub fn push(&mut self, t: f64, values: Vec<Vec<f64>>) -> Result<()> {
        self.acc.push(t, values)?;
        let cum = self.acc.current();
        for (i, &(a, b)) in self.intervals.iter().enumerate() {
            if (t - a).abs() <= self.tol {
                self.base[i] = Some(cum.to_vec());
            }
            if (t - b).abs() <= self.tol {
                if let Some(base) = &self.base[i] {
                    let diff = cum
                        .iter()
                        .zip(base)
                        .map(|(c, b0)| c.iter().zip(b0).map(|(x, y)| x - y).collect())
                        .collect();
                    self.done[i] = Some(diff);
                }
            }
        }
        Ok(())
    }

    pub fn finish_partial(self) -> Vec<Option<Vec<Vec<f64>>>> {
        self.done
    }

    pub fn finish(self) -> Result<Vec<Vec<Vec<f64>>>> {
        self.done
            .into_iter()
            .zip(&self.intervals)
            .map(|(d, &(a, b))| {
                d.ok_or_else(|| Error::Domain(format!("interval ({a}, {b}) was not sampled at both ends")))
            })
            .collect()
    }
}

/// Origin-centred stencil stored as signed lattice offsets, so that it can be
/// applied at any grid centre.
#[derive(Debug, Clone)]
pub(crate) struct OffsetStencil {
    n: usize,
    entries: Vec<([i64; 3], f64)>,
}

impl OffsetStencil {
    pub fn from_origin(grid: &Grid, s: &Stencil) -> Self {
        let n = grid.n();
        let signed = |i: usize| if 2 * i >= n { i as i64 - n as i64 } else { i as i64 };
        let entries = s
            .entries()
            .iter()
            .map(|&(p, w)| ([signed(p / (n * n)), signed((p / n) % n), signed(p % n)], w))
            .collect();
        Self { n, entries }
    }

    /// `Σ w · F(centre + offset)`.
    pub fn apply_at(&self, center: usize, f: impl Fn(usize) -> f64) -> f64 {
        let n = self.n as i64;
        let c = [(center / (self.n * self.n)) as i64, ((center / self.n) % self.n) as i64, (center % self.n) as i64];
        self.entries
            .iter()
            .map(|&(o, w)| {
                let i = (c[0] + o[0]).rem_euclid(n) as usize;
                let j = (c[1] + o[1]).rem_euclid(n) as usize;
                let k = (c[2] + o[2]).rem_euclid(n) as usize;
                w * f((i * self.n + j) * self.n + k)
            })
            .sum()
    }

    /// `max F` over the offsets carrying positive weight.
    pub fn max_at(&self, center: usize, f: impl Fn(usize) -> f64) -> f64 {
        let n = self.n as i64;
        let c = [(center / (self.n * self.n)) as i64, ((center / self.n) % self.n) as i64, (center % self.n) as i64];
        self.entries
            .iter()
            .filter(|e| e.1 > 0.0)
            .map(|&(o, _)| {
                let i = (c[0] + o[0]).rem_euclid(n) as usize;
                let j = (c[1] + o[1]).rem_euclid(n) as usize;
                let k = (c[2] + o[2]).rem_euclid(n) as usize;
                f((i * self.n + j) * self.n + k)
            })
            .fold(0.0, f64::max)
    }
}

/// Trigonometric interpolant of a scalar field at an arbitrary point.
pub(crate) fn point_value(field: &crate::spectral::ScalarField, x: [f64; 3]) -> f64 {
    use crate::spectral::SpectralField;
    let grid = field.grid();
    field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let k = grid.wavevector(idx);
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            grid.hermitian_weight(idx) * (c.re * phase.cos() - c.im * phase.sin())
        })
        .sum()
}

/// `∫_a^b` of a sampled series by the trapezoid rule, interpolating linearly
/// at the ends. Samples must cover `[a, b]`.
pub(crate) fn integrate_series(times: &[f64], values: &[f64], a: f64, b: f64, tol: f64) -> Result<f64> {
    if times.is_empty() || times[0] > a + tol || *times.last().unwrap() < b - tol {
        return domain(format!("samples do not cover the interval ({a}, {b})"));
    }
    let lerp = |t: f64| -> f64 {
        let i = times.partition_point(|&s| s < t).clamp(1, times.len().max(2) - 1);
        if times.len() == 1 {
            return values[0];
        }
        let (t0, t1) = (times[i - 1], times[i]);
        values[i - 1] + (values[i] - values[i - 1]) * (t - t0) / (t1 - t0)
    };
    let mut pts = vec![(a, lerp(a))];
    for (&t, &v) in times.iter().zip(values) {
        if t > a + tol && t < b - tol {
            pts.push((t, v));
        }
    }
    pts.push((b, lerp(b)));
    Ok(pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum())
}
