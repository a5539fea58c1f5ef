//! Empirical checks of the standing `≲` bounds on solver output.

use serde::{Deserialize, Serialize};

use crate::constants::BoundConstants;
use crate::error::Result;
use crate::regularization::{mollify, spectral_cutoff, Regularization};
use crate::solver::{DuhamelAccumulator, NormRecord};
use crate::spectral::ops::{gradient, tensor_divergence};
use crate::spectral::{linf_norm, SpectralField, TensorField, VectorField};

/// `lhs(t) ≤ rhs(t)` on a time grid, with the constant already folded
/// into `rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckRecord {
    pub name: String,
    pub constant: f64,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub worst_ratio: f64,
    pub pass: bool,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 || rhs.is_infinite() {
        0.0
    } else {
        lhs / rhs
    }
}

impl BoundCheckRecord {
    pub fn new(name: &str, constant: f64, times: Vec<f64>, lhs: Vec<f64>, rhs: Vec<f64>) -> Self {
        let worst_ratio = lhs.iter().zip(&rhs).map(|(&l, &r)| ratio(l, r)).fold(0.0, f64::max);
        Self { name: name.to_string(), constant, times, lhs, rhs, worst_ratio, pass: worst_ratio <= 1.0 }
    }

    /// Rows `(t, lhs, rhs, ratio)`.
    pub fn rows(&self) -> Vec<(f64, f64, f64, f64)> {
        self.times
            .iter()
            .zip(self.lhs.iter().zip(&self.rhs))
            .map(|(&t, (&l, &r))| (t, l, r, ratio(l, r)))
            .collect()
    }
}

/// `‖∇u‖_∞` on the 2× padded grid.
pub fn gradient_sup(u: &VectorField) -> f64 {
    gradient(u).magnitude_padded(2).into_iter().fold(0.0, f64::max)
}

fn gradient_rhs(t: f64, m: f64, c: f64) -> f64 {
    if t <= 0.0 {
        f64::INFINITY
    } else {
        c * (m * m).max(m / t.sqrt())
    }
}

/// `‖∇u_ε(t)‖_∞` against `C max{M², M/√t}`.
pub fn gradient_bound_check(states: &[VectorField], m: f64, c: f64) -> BoundCheckRecord {
    let times: Vec<f64> = states.iter().map(|u| u.time()).collect();
    let lhs = states.iter().map(gradient_sup).collect();
    let rhs = times.iter().map(|&t| gradient_rhs(t, m, c)).collect();
    BoundCheckRecord::new("gradient", c, times, lhs, rhs)
}

/// `‖G g(t)‖_∞` against `CεM²` for a uniformly sampled `g` series.
pub fn duhamel_bound_check(g: &[TensorField], times: &[f64], epsilon: f64, m: f64, c: f64) -> Result<BoundCheckRecord> {
    let lhs = match g.first() {
        None => Vec::new(),
        Some(g0) => {
            let h = if times.len() > 1 { times[1] - times[0] } else { 1.0 };
            let mut acc = DuhamelAccumulator::new(g0.grid(), h);
            g.iter().map(|gi| acc.push(&tensor_divergence(gi)).map(linf_norm)).collect::<Result<Vec<_>>>()?
        }
    };
    let rhs = vec![c * epsilon * m * m; times.len()];
    Ok(BoundCheckRecord::new("duhamel", c, times.to_vec(), lhs, rhs))
}

/// `‖u(t)‖_∞` against `C‖u₀‖_{L²} t^{-3/4}` for `t ≥ t_min`.
pub fn decay_check(norms: &[NormRecord], l2_init: f64, c: f64, t_min: f64) -> BoundCheckRecord {
    let kept: Vec<&NormRecord> = norms.iter().filter(|r| r.t >= t_min && r.t > 0.0).collect();
    let times = kept.iter().map(|r| r.t).collect();
    let lhs = kept.iter().map(|r| r.linf).collect();
    let rhs = kept.iter().map(|r| c * l2_init * r.t.powf(-0.75)).collect();
    BoundCheckRecord::new("decay", c, times, lhs, rhs)
}

/// `‖u_ε - R_ε u_ε‖_∞` against `Cε‖∇u_ε‖_∞`, where `R_ε` is the
/// regularization's smoothing operator.
pub fn mollification_bound_check(states: &[VectorField], reg: &Regularization, c: f64) -> Result<BoundCheckRecord> {
    let mut mon = DiagnosticsMonitor::new(reg.clone(), 1.0, BoundConstants { mollification: c, ..Default::default() });
    for u in states {
        mon.observe_smoothing(u)?;
    }
    Ok(mon.smoothing_record())
}

/// `‖u(t)‖_{L²}` never exceeds its running minimum by more than `10h`
/// relative.
pub fn energy_monitor(norms: &[NormRecord], h: f64) -> BoundCheckRecord {
    let mut floor = f64::INFINITY;
    let mut rhs = Vec::with_capacity(norms.len());
    for r in norms {
        rhs.push(if floor.is_finite() { floor * (1.0 + 10.0 * h) } else { f64::INFINITY });
        floor = floor.min(r.l2);
    }
    BoundCheckRecord::new(
        "energy",
        1.0,
        norms.iter().map(|r| r.t).collect(),
        norms.iter().map(|r| r.l2).collect(),
        rhs,
    )
}

/// Streams the states of a regularized run and evaluates the gradient,
/// Duhamel and smoothing checks without storing the trajectory.
pub struct DiagnosticsMonitor {
    reg: Regularization,
    m: f64,
    constants: BoundConstants,
    duhamel: Option<DuhamelAccumulator>,
    times: Vec<f64>,
    grad: Vec<f64>,
    duh: Vec<f64>,
    smooth: Vec<f64>,
}

impl DiagnosticsMonitor {
    pub fn new(reg: Regularization, m: f64, constants: BoundConstants) -> Self {
        Self { reg, m, constants, duhamel: None, times: Vec::new(), grad: Vec::new(), duh: Vec::new(), smooth: Vec::new() }
    }

    fn smoothing_defect(&self, u: &VectorField) -> Result<f64> {
        Ok(match &self.reg {
            Regularization::None => 0.0,
            Regularization::Leray(m) => linf_norm(&u.sub(&mollify(u, m)?)?),
            Regularization::Projection(c) => linf_norm(&u.sub(&spectral_cutoff(u, c)?)?),
        })
    }

    fn observe_smoothing(&mut self, u: &VectorField) -> Result<()> {
        self.times.push(u.time());
        self.grad.push(gradient_sup(u));
        self.smooth.push(self.smoothing_defect(u)?);
        Ok(())
    }

    /// Feed consecutive time levels of a uniform step `h`.
    pub fn observe(&mut self, u: &VectorField, h: f64) -> Result<()> {
        self.observe_smoothing(u)?;
        let acc = self.duhamel.get_or_insert_with(|| DuhamelAccumulator::new(u.grid(), h));
        let g = self.reg.error_tensor(u)?;
        self.duh.push(linf_norm(acc.push(&tensor_divergence(&g))?));
        Ok(())
    }

    fn smoothing_record(&self) -> BoundCheckRecord {
        let eps = self.reg.kind().epsilon();
        let c = self.constants.mollification;
        let rhs = self.grad.iter().map(|g| c * eps * g).collect();
        BoundCheckRecord::new("mollification", c, self.times.clone(), self.smooth.clone(), rhs)
    }

    pub fn finish(self) -> Vec<BoundCheckRecord> {
        let eps = self.reg.kind().epsilon();
        let (m, k) = (self.m, self.constants);
        let grad_rhs = self.times.iter().map(|&t| gradient_rhs(t, m, k.gradient)).collect();
        let smooth = self.smoothing_record();
        vec![
            BoundCheckRecord::new("gradient", k.gradient, self.times.clone(), self.grad, grad_rhs),
            BoundCheckRecord::new("duhamel", k.duhamel, self.times.clone(), self.duh, vec![k.duhamel * eps * m * m; self.times.len()]),
            smooth,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn zero_fields_pass() {
        let g = Grid::periodic_2pi(8).unwrap();
        let states: Vec<VectorField> = (0..3).map(|i| VectorField::zeros(g).with_time(0.1 * i as f64)).collect();
        let r = gradient_bound_check(&states, 1.0, 1.0);
        assert!(r.pass && r.worst_ratio == 0.0);
        let gs = vec![TensorField::zeros(g); 3];
        let d = duhamel_bound_check(&gs, &[0.0, 0.1, 0.2], 0.01, 1.0, 1.0).unwrap();
        assert!(d.lhs.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gradient_rhs_plateaus() {
        assert_eq!(gradient_rhs(0.0, 1.0, 1.0), f64::INFINITY);
        assert_eq!(gradient_rhs(100.0, 2.0, 1.0), 4.0);
        assert_eq!(gradient_rhs(0.01, 2.0, 1.0), 20.0);
    }
}
