//! Global-scale criterion: step budget, growth lemma, `K`-step induction,
//! corollary threshold and twin-error measurement.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::{linf_norm, VectorField};

/// `τ = θ²/M²` and `K = TM²/θ² + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalBudget {
    pub theta: f64,
    pub tau: f64,
    pub k: usize,
    pub m: f64,
    pub t: f64,
}

/// Largest `θ ≤ θ_target` making `TM²/θ²` an integer.
pub fn plan_steps(m: f64, t: f64, theta_target: f64) -> Result<GlobalBudget> {
    if !(m > 0.0 && t >= 0.0 && theta_target > 0.0) {
        return domain(format!("plan_steps needs M > 0, T ≥ 0, θ > 0 (got {m}, {t}, {theta_target})"));
    }
    let scale = t * m * m;
    if scale == 0.0 {
        let theta = theta_target;
        return Ok(GlobalBudget { theta, tau: theta * theta / (m * m), k: 1, m, t });
    }
    let raw = scale / (theta_target * theta_target);
    let steps = if (raw - raw.round()).abs() <= 1e-9 * raw { raw.round() } else { raw.ceil() };
    let steps = steps.max(1.0);
    let theta = (scale / steps).sqrt();
    Ok(GlobalBudget { theta, tau: theta * theta / (m * m), k: steps as usize + 1, m, t })
}

/// `α = CεM²`, `β = Cθ`, `γ = Cθ/M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GrowthCoefficients {
    pub fn new(epsilon: f64, m: f64, theta: f64, c: f64) -> Self {
        Self { alpha: c * epsilon * m * m, beta: c * theta, gamma: c * theta / m }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthStep {
    pub certified: bool,
    /// `4(φ(0) + α)` when certified.
    pub bound: f64,
}

/// Growth lemma: for nondecreasing `φ` with
/// `φ(t) ≤ φ(0) + α + βφ(t) + γφ(t)²`, `β < 1/2` and `φ(0) + α < 1/(16γ)`
/// give `φ(τ) < 4(φ(0) + α)`.
pub fn check_growth_step(phi0: f64, alpha: f64, beta: f64, gamma: f64) -> GrowthStep {
    let lam = phi0 + alpha;
    let certified = beta < 0.5 && 16.0 * gamma * lam < 1.0;
    GrowthStep { certified, bound: if certified { 4.0 * lam } else { f64::NAN } }
}

/// Named inequality with both sides, for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Condition {
    pub fn less(name: &str, lhs: f64, rhs: f64) -> Self {
        Self { name: name.to_string(), lhs, rhs, pass: lhs < rhs }
    }

    pub fn at_most(name: &str, lhs: f64, rhs: f64) -> Self {
        Self { name: name.to_string(), lhs, rhs, pass: lhs <= rhs }
    }

    /// `lhs < rhs` compared through logarithms of positive quantities, so that
    /// factors like `4^{2K}` never overflow. Sides are reported as logs.
    pub fn less_log(name: &str, log_lhs: f64, log_rhs: f64) -> Self {
        Self { name: format!("log({name})"), lhs: log_lhs, rhs: log_rhs, pass: log_lhs < log_rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub j: usize,
    pub t: f64,
    /// `4^{2j} α`.
    pub bound: f64,
    /// Lemma bound `4(φ(t_{j-1}) + α)` propagated from the previous entry.
    pub lemma_bound: f64,
    /// Measured `sup_{[0,t_j]} ‖v‖_∞`, when supplied.
    pub measured: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthLedger {
    pub coefficients: GrowthCoefficients,
    pub conditions: Vec<Condition>,
    pub entries: Vec<LedgerEntry>,
    pub pass: bool,
    /// First failing condition or entry.
    pub failure: Option<String>,
    /// Claimed bound on the exact solution when the ledger passes.
    pub sup_bound: f64,
}

/// Run the `K`-step induction. `measured` is an optional series of
/// `(t, ‖v(t)‖_∞)` samples compared against each step bound.
pub fn run_global_induction(
    budget: &GlobalBudget,
    epsilon: f64,
    m: f64,
    c: f64,
    measured: Option<&[(f64, f64)]>,
) -> GrowthLedger {
    let co = GrowthCoefficients::new(epsilon, m, budget.theta, c);
    let k = budget.k as f64;
    let ln4 = 4f64.ln();
    let mut conditions = vec![Condition::less("C·θ < 1/2", co.beta, 0.5)];
    if co.alpha > 0.0 {
        conditions.push(Condition::less_log("4^{2K}·α < M", 2.0 * k * ln4 + co.alpha.ln(), m.ln()));
        conditions.push(Condition::less_log(
            "α·γ < 4^{-2K-3}",
            (co.alpha * co.gamma).ln(),
            -(2.0 * k + 3.0) * ln4,
        ));
    } else {
        conditions.push(Condition::less("4^{2K}·α < M", 0.0, m));
        conditions.push(Condition::less("α·γ < 4^{-2K-3}", 0.0, 4f64.powf(-(2.0 * k + 3.0))));
    }
    let mut failure = conditions.iter().find(|c| !c.pass).map(|c| c.name.clone());
    let mut entries = Vec::new();
    let mut all_pass = failure.is_none();
    // φ₀(0) ≤ α after rescaling α by a constant factor.
    let mut phi = co.alpha;
    let mut bound = 16.0 * co.alpha;
    for j in 2..=budget.k {
        let step = check_growth_step(phi, co.alpha, co.beta, co.gamma);
        // Multiplying by 16 each step keeps the bound finite as long as
        // 16^j α is, and keeps it 0 when α = 0.
        bound *= 16.0;
        let t = (j - 1) as f64 * budget.tau;
        let sup_measured = measured.map(|series| {
            series
                .iter()
                .filter(|(s, _)| *s <= t * (1.0 + 1e-12) + 1e-15)
                .map(|p| p.1)
                .fold(0.0, f64::max)
        });
        let mut pass = all_pass && step.certified && step.bound <= bound;
        if let Some(v) = sup_measured {
            pass &= v < bound || (v == 0.0 && bound == 0.0);
        }
        if !pass && all_pass {
            failure = Some(if !step.certified {
                format!("growth lemma hypotheses fail at step {j}")
            } else {
                format!("measured error exceeds 4^{{2j}}α at step {j}")
            });
        }
        all_pass &= pass;
        entries.push(LedgerEntry { j, t, bound, lemma_bound: step.bound, measured: sup_measured, pass });
        phi = bound;
    }
    GrowthLedger { coefficients: co, conditions, entries, pass: all_pass, failure, sup_bound: 2.0 * m }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub pass: bool,
    pub threshold: f64,
}

/// `ε ≤ δ₁ M⁻¹ exp(-μ₁ T M²)`.
pub fn evaluate_criterion_global(epsilon: f64, m: f64, t: f64, delta1: f64, mu1: f64) -> Result<CriterionVerdict> {
    if !(m > 0.0 && t >= 0.0) {
        return domain(format!("criterion needs M > 0 and T ≥ 0 (got {m}, {t})"));
    }
    let threshold = delta1 / m * (-mu1 * t * m * m).exp();
    Ok(CriterionVerdict { pass: epsilon <= threshold, threshold })
}

/// `T₀ = C ‖u₀‖_{L²}^4`.
pub fn evaluate_t0(l2_norm: f64, c: f64) -> f64 {
    c * l2_norm.powi(4)
}

/// `ε ≤ C₁ M⁻¹ exp(-C₂ ‖u₀‖_{L²}^4 M²)`.
pub fn evaluate_criterion_corollary(epsilon: f64, m: f64, l2_norm: f64, c1: f64, c2: f64) -> Result<CriterionVerdict> {
    if !(m > 0.0) {
        return domain(format!("criterion needs M > 0 (got {m})"));
    }
    let threshold = c1 / m * (-c2 * l2_norm.powi(4) * m * m).exp();
    Ok(CriterionVerdict { pass: epsilon <= threshold, threshold })
}

/// Error series between a regularized run and a reference run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwinError {
    pub times: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log ‖v‖` against `t` over the nonzero samples.
    pub rate: Option<f64>,
}

impl TwinError {
    /// Samples paired with `4CεM² · 4^{2⌈t/τ⌉}` and whether each lies below it.
    pub fn envelope(&self, epsilon: f64, m: f64, tau: f64, c: f64) -> Vec<(f64, f64, f64, bool)> {
        self.times
            .iter()
            .zip(&self.errors)
            .map(|(&t, &e)| {
                let steps = (t / tau - 1e-9).ceil().max(0.0);
                let env = 4.0 * c * epsilon * m * m * 16f64.powf(steps);
                (t, e, env, e <= env)
            })
            .collect()
    }
}

/// `‖u_ε(t) - u_ref(t)‖_∞` on aligned samples. A reference on a finer grid
/// of the same box is truncated to the coarse grid first.
pub fn measure_twin_error(eps: &[VectorField], reference: &[VectorField]) -> Result<TwinError> {
    if eps.len() != reference.len() {
        return domain("twin trajectories have different sample counts");
    }
    let mut times = Vec::with_capacity(eps.len());
    let mut errors = Vec::with_capacity(eps.len());
    for (a, b) in eps.iter().zip(reference) {
        if (a.time() - b.time()).abs() > 1e-9 * (1.0 + a.time().abs()) {
            return domain(format!("misaligned samples at t = {} and {}", a.time(), b.time()));
        }
        let b = b.resampled(*crate::spectral::SpectralField::grid(a))?;
        times.push(a.time());
        errors.push(linf_norm(&a.sub(&b)?));
    }
    let rate = fit_log_rate(&times, &errors);
    Ok(TwinError { times, errors, rate })
}

fn fit_log_rate(times: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        times.iter().zip(values).filter(|(_, &v)| v > 0.0).map(|(&t, &v)| (t, v.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
