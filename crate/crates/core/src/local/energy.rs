use serde::{Deserialize, Serialize};

use super::bump::BumpFunction;
use super::window::{point_of, Accumulator, CenterSet};
use crate::error::{domain, Error, Result};
use crate::spectral::ops::gradient;
use crate::spectral::{Convolver, Grid, SpectralField, Stencil, VectorField};

/// Pointwise `|v|²/2` and `|∇v|²` on the grid.
pub fn energy_densities(v: &VectorField) -> (Vec<f64>, Vec<f64>) {
    let phys = v.to_physical();
    let kinetic = (0..phys[0].len())
        .map(|p| 0.5 * (phys[0][p] * phys[0][p] + phys[1][p] * phys[1][p] + phys[2][p] * phys[2][p]))
        .collect();
    let grad = gradient(v).physical_components();
    let diss = (0..grad[0].len()).map(|p| grad.iter().map(|c| c[p] * c[p]).sum()).collect();
    (kinetic, diss)
}

/// Evaluation window `(start, end]` of the windowed local energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub k: usize,
    pub start: f64,
    pub end: f64,
}

/// Windowed local energy
/// `e(t) = sup_{s ∈ (c, t), y} [∫|v(s)|²/2 φ_{r,y} + ∫_c^s ∫|∇v|² φ_{r,y}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalEnergyWindow {
    pub k: usize,
    pub start: f64,
    pub end: f64,
    pub r: f64,
    /// `e(end)`.
    pub e_value: f64,
    /// `e(c⁺) = sup_y ∫|v(c)|²/2 φ_{r,y}`.
    pub e_start: f64,
    pub y_max: [f64; 3],
    /// `(t, e(t))` at every sample in the window.
    pub series: Vec<(f64, f64)>,
}

struct WindowState {
    spec: WindowSpec,
    base: Option<Vec<f64>>,
    e_start: f64,
    best: f64,
    arg: usize,
    series: Vec<(f64, f64)>,
}

/// Streams samples of `v` and maintains several energy windows at once.
pub struct EnergyTracker {
    grid: Grid,
    r: f64,
    conv: Convolver,
    centers: Vec<usize>,
    acc: Accumulator,
    windows: Vec<WindowState>,
    tol: f64,
}

fn gather(values: &[f64], centers: &[usize]) -> Vec<f64> {
    centers.iter().map(|&p| values[p]).collect()
}

impl EnergyTracker {
    pub fn new(grid: &Grid, r: f64, centers: &CenterSet, windows: &[WindowSpec], time_tol: f64) -> Result<Self> {
        let bump = BumpFunction::new(r, [0.0; 3], grid)?;
        let conv = Convolver::new(grid, &bump.value_stencil(grid));
        let centers = centers.indices(grid)?;
        for w in windows {
            if !(w.end > w.start) {
                return domain(format!("window {} has empty interval ({}, {})", w.k, w.start, w.end));
            }
        }
        let states = windows
            .iter()
            .map(|&spec| WindowState { spec, base: None, e_start: 0.0, best: 0.0, arg: 0, series: Vec::new() })
            .collect();
        let len = centers.len();
        Ok(Self { grid: *grid, r, conv, centers, acc: Accumulator::new(1, len), windows: states, tol: time_tol })
    }

    pub fn observe(&mut self, t: f64, v: &VectorField) -> Result<()> {
        v.grid().check_same(&self.grid)?;
        let (kin, diss) = energy_densities(v);
        let a = gather(&self.conv.apply(&kin), &self.centers);
        let d = gather(&self.conv.apply(&diss), &self.centers);
        self.acc.push(t, vec![d])?;
        let cum = &self.acc.current()[0];
        for w in &mut self.windows {
            if (t - w.spec.start).abs() <= self.tol {
                w.base = Some(cum.clone());
                w.e_start = a.iter().cloned().fold(0.0, f64::max);
                continue;
            }
            if t > w.spec.start && t <= w.spec.end + self.tol {
                let Some(base) = &w.base else { continue };
                for (i, ((ai, ci), bi)) in a.iter().zip(cum).zip(base).enumerate() {
                    let val = ai + ci - bi;
                    if val > w.best {
                        w.best = val;
                        w.arg = i;
                    }
                }
                w.series.push((t, w.best));
            }
        }
        Ok(())
    }

    /// Completed windows; `None` for windows whose start or end was never
    /// sampled.
    pub fn finish_partial(self) -> Vec<Option<LocalEnergyWindow>> {
        let grid = self.grid;
        let (r, tol) = (self.r, self.tol);
        let centers = self.centers;
        self.windows
            .into_iter()
            .map(|w| {
                w.base.as_ref()?;
                let &(t, _) = w.series.last()?;
                if (t - w.spec.end).abs() > tol {
                    return None;
                }
                Some(LocalEnergyWindow {
                    k: w.spec.k,
                    start: w.spec.start,
                    end: w.spec.end,
                    r,
                    e_value: w.best,
                    e_start: w.e_start,
                    y_max: point_of(&grid, centers[w.arg]),
                    series: w.series,
                })
            })
            .collect()
    }

    pub fn finish(self) -> Result<Vec<LocalEnergyWindow>> {
        let specs: Vec<WindowSpec> = self.windows.iter().map(|w| w.spec).collect();
        self.finish_partial()
            .into_iter()
            .zip(specs)
            .map(|(w, s)| w.ok_or_else(|| Error::Domain(format!("window {} ({}, {}] was not fully sampled", s.k, s.start, s.end))))
            .collect()
    }
}

/// Windowed energy of a sampled trajectory `(t_i, v_i)` over `(start, end]`.
pub fn windowed_energy(
    samples: &[(f64, VectorField)],
    start: f64,
    end: f64,
    r: f64,
    centers: &CenterSet,
) -> Result<LocalEnergyWindow> {
    let Some((_, first)) = samples.first() else {
        return domain("empty trajectory");
    };
    let tol = 1e-9 * end.abs().max(1e-300);
    let mut tracker = EnergyTracker::new(first.grid(), r, centers, &[WindowSpec { k: 0, start, end }], tol)?;
    for (t, v) in samples {
        if *t < start - tol || *t > end + tol {
            continue;
        }
        tracker.observe(*t, v)?;
    }
    Ok(tracker.finish()?.remove(0))
}

/// Direct quadrature of `∫ F φ_{r,y}` at one centre, for checks.
pub fn bump_integral(grid: &Grid, r: f64, y: [f64; 3], values: &[f64]) -> Result<f64> {
    let b = BumpFunction::new(r, y, grid)?;
    let s: Stencil = b.value_stencil(grid);
    Ok(s.integrate(values))
}
