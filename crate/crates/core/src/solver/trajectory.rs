use serde::{Deserialize, Serialize};

use super::integrator::Integrator;
use crate::error::{Error, Result};
use crate::regularization::Regularization;
use crate::spectral::{gradient, l2_norm, linf_norm, SpectralField, VectorField};

/// Norms recorded at one time level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub t: f64,
    pub linf: f64,
    pub l2: f64,
    pub grad_l2: f64,
}

impl NormRecord {
    pub fn of(u: &VectorField) -> Self {
        Self { t: u.time(), linf: linf_norm(u), l2: l2_norm(u), grad_l2: l2_norm(&gradient(u)) }
    }
}

/// Integration settings shared by every run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Keep every `store_every`-th state; the initial and final states are
    /// always kept.
    pub store_every: usize,
    /// `L∞` ceiling treated as blow-up.
    pub ceiling: f64,
    /// Safety factor of the step restriction `h ≤ c·min(Δx/‖u₀‖_∞, Δx²)`.
    pub cfl_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { store_every: 1, ceiling: 1e6, cfl_factor: 0.25 }
    }
}

/// Largest admissible step for data of sup norm `linf` on a grid of spacing `dx`.
pub fn cfl_limit(dx: f64, linf: f64, factor: f64) -> f64 {
    let advective = if linf > 0.0 { dx / linf } else { f64::INFINITY };
    factor * advective.min(dx * dx)
}

/// Number of uniform steps covering `[0, T]` with step at most `h`, and the
/// resulting step.
pub fn uniform_steps(horizon: f64, h: f64) -> Result<(usize, f64)> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!("horizon {horizon} must be finite and nonnegative")));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("time step {h} must be positive")));
    }
    if horizon == 0.0 {
        return Ok((0, h));
    }
    let steps = ((horizon / h) - 1e-9).ceil().max(1.0) as usize;
    Ok((steps, horizon / steps as f64))
}

/// Time-discrete solution with uniform step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub h: f64,
    pub norms: Vec<NormRecord>,
    pub states: Vec<VectorField>,
}

impl Trajectory {
    /// Running `max_t ‖u(t)‖_{L∞}`.
    pub fn sup_linf(&self) -> f64 {
        self.norms.iter().map(|r| r.linf).fold(0.0, f64::max)
    }

    pub fn times(&self) -> Vec<f64> {
        self.norms.iter().map(|r| r.t).collect()
    }

    pub fn final_state(&self) -> Option<&VectorField> {
        self.states.last()
    }
}

/// Integrate from `u0` to `horizon`, calling `observe` on every time level
/// (including `t = 0`).
pub fn solve_with(
    u0: &VectorField,
    horizon: f64,
    h: f64,
    reg: Regularization,
    opts: &SolveOptions,
    mut observe: impl FnMut(&VectorField, &NormRecord),
) -> Result<Trajectory> {
    let (steps, h) = uniform_steps(horizon, h)?;
    let first = NormRecord::of(u0);
    let limit = cfl_limit(u0.grid().dx(), first.linf, opts.cfl_factor);
    if h > limit {
        return Err(Error::Domain(format!("time step {h} exceeds the stability limit {limit}")));
    }
    let mut it = Integrator::new(u0.clone().with_time(0.0), h, reg)?.with_ceiling(opts.ceiling);
    let mut traj = Trajectory { h, norms: vec![first], states: vec![it.state().clone()] };
    observe(it.state(), &first);
    for k in 1..=steps {
        let u = it.advance()?;
        let rec = NormRecord::of(u);
        if !(rec.linf <= opts.ceiling) {
            return Err(Error::BlowUp {
                last_valid_time: u.time() - h,
                reason: format!("sup norm {} above ceiling {}", rec.linf, opts.ceiling),
            });
        }
        observe(u, &rec);
        traj.norms.push(rec);
        if k == steps || (opts.store_every > 0 && k % opts.store_every == 0) {
            traj.states.push(u.clone());
        }
    }
    Ok(traj)
}

pub fn solve(u0: &VectorField, horizon: f64, h: f64, reg: Regularization, opts: &SolveOptions) -> Result<Trajectory> {
    solve_with(u0, horizon, h, reg, opts, |_, _| {})
}

/// Guaranteed existence window `C₀ ‖u₀‖_{L∞}^{-2}`.
pub fn local_existence_time(u0_linf: f64, c0: f64) -> Result<f64> {
    if !(u0_linf >= 0.0) {
        return Err(Error::Domain(format!("sup norm {u0_linf} must be nonnegative")));
    }
    if u0_linf == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(c0 / (u0_linf * u0_linf))
}
