//! End-to-end runs: a regularized solve in lockstep with an unregularized
//! reference, fed into the certifiers and the diagnostics.

use serde::{Deserialize, Serialize};

use crate::constants::{BoundConstants, CertificationConstants};
use crate::diagnostics::{decay_check, energy_monitor, BoundCheckRecord, DiagnosticsMonitor};
use crate::error::{domain, Error, Result};
use crate::global::{
    evaluate_criterion_corollary, evaluate_criterion_global, evaluate_t0, plan_steps, run_global_induction,
    Condition, GlobalBudget, GrowthLedger, TwinError,
};
use crate::local::{plan_local, CenterSet, LocalExponents, LocalLedger, LocalMonitor, LocalParams, LocalSample};
use crate::regularization::{Regularization, RegularizationKind};
use crate::solver::{cfl_limit, uniform_steps, Integrator, NormRecord, SolveOptions};
use crate::spectral::{l2_norm, linf_norm, SpectralField, VectorField};

/// Stand-in for the exact solution: an unregularized run on a grid refined
/// by `refine` with `substeps` steps per regularized step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpec {
    pub refine: usize,
    pub substeps: usize,
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        Self { refine: 2, substeps: 4 }
    }
}

/// Norm series of both runs and the sup-norm error between them.
#[derive(Debug, Clone)]
pub struct TwinRun {
    pub h: f64,
    pub norms: Vec<NormRecord>,
    pub reference_norms: Vec<NormRecord>,
    pub errors: Vec<(f64, f64)>,
    pub final_state: VectorField,
    pub final_reference: VectorField,
}

impl TwinRun {
    pub fn sup_linf(&self) -> f64 {
        self.norms.iter().map(|r| r.linf).fold(0.0, f64::max)
    }

    pub fn twin_error(&self) -> TwinError {
        let times = self.errors.iter().map(|e| e.0).collect();
        let errors = self.errors.iter().map(|e| e.1).collect();
        let mut te = TwinError { times, errors, rate: None };
        te.rate = fit_rate(&self.errors);
        te
    }
}

fn fit_rate(series: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = series.iter().filter(|p| p.1 > 0.0).map(|p| (p.0, p.1.ln())).collect();
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

/// Default step for data `u0`: the stability limit of the regularized grid.
pub fn default_step(u0: &VectorField, opts: &SolveOptions) -> f64 {
    cfl_limit(u0.grid().dx(), linf_norm(u0), opts.cfl_factor)
}

/// Integrate the regularized system and the reference side by side over
/// `[0, horizon]`, calling `observe(u_ε, u_ref)` at every regularized time
/// level. Without a reference (`None`) the second argument is `u_ε` itself.
pub fn run_twin(
    u0: &VectorField,
    horizon: f64,
    h: f64,
    kind: RegularizationKind,
    reference: Option<ReferenceSpec>,
    opts: &SolveOptions,
    mut observe: impl FnMut(&VectorField, &VectorField) -> Result<()>,
) -> Result<TwinRun> {
    let grid = *u0.grid();
    let (steps, h) = uniform_steps(horizon, h)?;
    let linf0 = linf_norm(u0);
    let limit = cfl_limit(grid.dx(), linf0, opts.cfl_factor);
    if h > limit * (1.0 + 1e-12) {
        return domain(format!("time step {h} exceeds the stability limit {limit}"));
    }
    let reg = Regularization::build(grid, kind)?;
    let mut it = Integrator::new(u0.clone().with_time(0.0), h, reg)?.with_ceiling(opts.ceiling);
    let mut twin = match reference {
        None => None,
        Some(spec) => {
            if spec.refine == 0 || spec.substeps == 0 {
                return domain("reference refine and substeps must be positive");
            }
            let fine = grid.refined(spec.refine);
            let hf = h / spec.substeps as f64;
            let lim = cfl_limit(fine.dx(), linf0, opts.cfl_factor);
            if hf > lim * (1.0 + 1e-12) {
                return domain(format!("reference step {hf} exceeds the stability limit {lim}"));
            }
            let r0 = u0.resampled(fine)?.with_time(0.0);
            Some((Integrator::new(r0, hf, Regularization::None)?.with_ceiling(opts.ceiling), spec.substeps))
        }
    };
    let mut norms = vec![NormRecord::of(it.state())];
    let mut reference_norms = Vec::new();
    let mut errors = Vec::new();
    let record = |u: &VectorField,
                  r: Option<&VectorField>,
                  rn: &mut Vec<NormRecord>,
                  errs: &mut Vec<(f64, f64)>|
     -> Result<()> {
        if let Some(r) = r {
            rn.push(NormRecord::of(r));
            let rc = if r.grid() == u.grid() { r.clone() } else { r.resampled(*u.grid())? };
            errs.push((u.time(), linf_norm(&u.sub(&rc)?)));
        }
        Ok(())
    };
    record(it.state(), twin.as_ref().map(|t| t.0.state()), &mut reference_norms, &mut errors)?;
    observe(it.state(), twin.as_ref().map_or(it.state(), |t| t.0.state()))?;
    for _ in 0..steps {
        let t_prev = it.time();
        let u = it.advance()?;
        let rec = NormRecord::of(u);
        if !(rec.linf <= opts.ceiling) {
            return Err(Error::BlowUp {
                last_valid_time: t_prev,
                reason: format!("sup norm {} above ceiling {}", rec.linf, opts.ceiling),
            });
        }
        norms.push(rec);
        if let Some((ri, sub)) = twin.as_mut() {
            for _ in 0..*sub {
                ri.advance()?;
            }
            let r = ri.state().clone().with_time(it.time());
            let rl = linf_norm(&r);
            if !(rl <= opts.ceiling) {
                return Err(Error::BlowUp {
                    last_valid_time: t_prev,
                    reason: format!("reference sup norm {rl} above ceiling {}", opts.ceiling),
                });
            }
            record(it.state(), Some(&r), &mut reference_norms, &mut errors)?;
            observe(it.state(), &r)?;
        } else {
            observe(it.state(), it.state())?;
        }
    }
    let final_state = it.state().clone();
    let final_reference = match twin {
        Some((ri, _)) => ri.state().clone().with_time(final_state.time()),
        None => final_state.clone(),
    };
    Ok(TwinRun { h, norms, reference_norms, errors, final_state, final_reference })
}

/// Settings shared by the certification drivers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifySetup {
    pub horizon: f64,
    /// Regularized step; `None` selects the stability limit.
    pub h: Option<f64>,
    /// `θ` target of the global budget.
    pub theta: f64,
    /// `κ` and `θ` target of the windowed induction.
    pub kappa: f64,
    pub theta_local: f64,
    /// Sup-norm bound `M`; `None` measures it on the run.
    pub m: Option<f64>,
    pub reference: ReferenceSpec,
    pub solve: SolveOptions,
    pub constants: CertificationConstants,
    pub exponents: LocalExponents,
    pub centers: CenterSet,
}

impl Default for CertifySetup {
    fn default() -> Self {
        Self {
            horizon: 0.1,
            h: None,
            theta: 0.1,
            kappa: 0.25,
            theta_local: 0.02,
            m: None,
            reference: ReferenceSpec::default(),
            solve: SolveOptions::default(),
            constants: CertificationConstants::default(),
            exponents: LocalExponents::regularization_default(),
            centers: CenterSet::default(),
        }
    }
}

/// Inputs echoed into every certification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertInputs {
    pub regularization: RegularizationKind,
    pub epsilon: f64,
    pub m: f64,
    pub horizon: f64,
    pub grid_n: usize,
    pub box_length: f64,
    pub h: f64,
    pub reference: Option<ReferenceSpec>,
    pub u0_linf: f64,
    pub u0_l2: f64,
    /// Largest measured `‖u_ε(t)‖_∞`.
    pub sup_linf: f64,
}

/// Global or corollary certification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalReport {
    pub criterion: String,
    pub inputs: CertInputs,
    pub constants: CertificationConstants,
    pub budget: GlobalBudget,
    pub mu: f64,
    pub threshold: f64,
    /// Whether `ε` lies below the threshold.
    pub criterion_pass: bool,
    pub pass: bool,
    pub ledger: GrowthLedger,
    pub conclusion_bound: f64,
    pub twin: TwinError,
    pub failure: Option<String>,
}

fn inputs(u0: &VectorField, kind: RegularizationKind, m: f64, horizon: f64, run: &TwinRun, reference: Option<ReferenceSpec>) -> CertInputs {
    CertInputs {
        regularization: kind,
        epsilon: kind.epsilon(),
        m,
        horizon,
        grid_n: u0.grid().n(),
        box_length: u0.grid().box_length(),
        h: run.h,
        reference,
        u0_linf: linf_norm(u0),
        u0_l2: l2_norm(u0),
        sup_linf: run.sup_linf(),
    }
}

fn step_for(u0: &VectorField, setup: &CertifySetup) -> f64 {
    setup.h.unwrap_or_else(|| default_step(u0, &setup.solve))
}

fn sup_condition(sup: f64, m: f64) -> Condition {
    Condition::at_most("sup |u_eps| <= M", sup, m * (1.0 + 1e-12))
}

fn assemble(
    criterion: &str,
    u0: &VectorField,
    kind: RegularizationKind,
    setup: &CertifySetup,
    horizon: f64,
    run: TwinRun,
    threshold_of: impl Fn(f64, &GlobalBudget, f64) -> Result<(f64, bool)>,
) -> Result<GlobalReport> {
    let c = &setup.constants;
    let sup = run.sup_linf();
    let m = setup.m.unwrap_or(sup).max(f64::MIN_POSITIVE);
    let budget = plan_steps(m, horizon, setup.theta)?;
    let mu = c.mu1.unwrap_or(4.0 / (budget.theta * budget.theta));
    let (threshold, criterion_pass) = threshold_of(m, &budget, mu)?;
    let epsilon = kind.epsilon();
    let mut ledger = run_global_induction(&budget, epsilon, m, c.c, Some(&run.errors));
    let sup_cond = sup_condition(sup, m);
    if !sup_cond.pass {
        ledger.pass = false;
        ledger.failure.get_or_insert_with(|| sup_cond.name.clone());
    }
    ledger.conditions.insert(0, sup_cond);
    let failure = if !criterion_pass {
        Some(format!("epsilon <= threshold ({epsilon:e} > {threshold:e})"))
    } else {
        ledger.failure.clone()
    };
    Ok(GlobalReport {
        criterion: criterion.to_string(),
        inputs: inputs(u0, kind, m, horizon, &run, Some(setup.reference)),
        constants: *c,
        budget,
        mu,
        threshold,
        criterion_pass,
        pass: criterion_pass && ledger.pass,
        conclusion_bound: 2.0 * m,
        ledger,
        twin: run.twin_error(),
        failure,
    })
}

/// Global criterion `ε ≤ δ₁M⁻¹exp(-μ₁TM²)` and the `K`-step ledger, with
/// measured twin errors compared against each step bound.
pub fn certify_global(u0: &VectorField, kind: RegularizationKind, setup: &CertifySetup) -> Result<GlobalReport> {
    let run = run_twin(u0, setup.horizon, step_for(u0, setup), kind, Some(setup.reference), &setup.solve, |_, _| Ok(()))?;
    let c = setup.constants;
    assemble("global", u0, kind, setup, setup.horizon, run, |m, b, mu| {
        let v = evaluate_criterion_global(kind.epsilon(), m, b.t, c.delta1, mu)?;
        Ok((v.threshold, v.pass))
    })
}

/// Corollary criterion over the horizon `T₀ = c_t0 ‖u₀‖_{L²}^4`. The
/// conclusion bound is `C̃M` with `C̃ = 2`.
pub fn certify_corollary(u0: &VectorField, kind: RegularizationKind, setup: &CertifySetup) -> Result<GlobalReport> {
    let l2 = l2_norm(u0);
    let t0 = evaluate_t0(l2, setup.constants.c_t0);
    if !(t0 > 0.0 && t0.is_finite()) {
        return domain(format!("corollary horizon T0 = {t0} must be positive and finite"));
    }
    let run = run_twin(u0, t0, step_for(u0, setup), kind, Some(setup.reference), &setup.solve, |_, _| Ok(()))?;
    let c = setup.constants;
    assemble("corollary", u0, kind, setup, t0, run, |m, _, _| {
        let v = evaluate_criterion_corollary(kind.epsilon(), m, l2, c.c1, c.c2)?;
        Ok((v.threshold, v.pass))
    })
}

/// `δ₂M⁻¹exp(-μ₂TM²)` for the windowed induction of `setup`.
pub fn local_threshold(m: f64, setup: &CertifySetup) -> Result<f64> {
    let c = &setup.constants;
    let plan = plan_local(m, setup.horizon, setup.kappa, setup.theta_local, c)?;
    let mu2 = c.mu2.unwrap_or(2.0 * plan.n as f64 / (plan.kappa * plan.kappa * plan.theta * setup.exponents.rho()));
    Ok(c.delta2 / m * (-mu2 * plan.horizon * m * m).exp())
}

/// Local certification report: the ledger plus the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalReport {
    pub criterion: String,
    pub inputs: CertInputs,
    #[serde(flatten)]
    pub ledger: LocalLedger,
}

fn local_pass(u0: &VectorField, kind: RegularizationKind, setup: &CertifySetup, m: f64) -> Result<(LocalLedger, TwinRun, f64)> {
    let grid = *u0.grid();
    let plan = plan_local(m, setup.horizon, setup.kappa, setup.theta_local, &setup.constants)?;
    let cap = setup.h.unwrap_or_else(|| default_step(u0, &setup.solve));
    let sub = (plan.step() / cap - 1e-9).ceil().max(1.0);
    let h = plan.step() / sub;
    let params = LocalParams {
        epsilon: kind.epsilon(),
        plan,
        exponents: setup.exponents.clone(),
        constants: setup.constants,
        centers: setup.centers.clone(),
    };
    let mut monitor = LocalMonitor::new(&grid, params)?;
    let reg = Regularization::build(grid, kind)?;
    let run = run_twin(u0, plan.horizon, h, kind, Some(setup.reference), &setup.solve, |u, r| {
        monitor.observe(&LocalSample::from_pair(u.time(), u, r, &reg)?)
    })?;
    Ok((monitor.finish(), run, plan.horizon))
}

/// Windowed local-energy induction and ε-regularity checks on the
/// difference between the regularized run and the reference. `M` defaults
/// to `‖u₀‖_∞`; when the run exceeds it, the certification is redone once
/// with the measured sup.
pub fn certify_local(u0: &VectorField, kind: RegularizationKind, setup: &CertifySetup) -> Result<LocalReport> {
    let mut m = setup.m.unwrap_or_else(|| linf_norm(u0));
    if !(m > 0.0) {
        return domain("local certification needs nonzero data or an explicit M");
    }
    let (mut ledger, mut run, mut horizon) = local_pass(u0, kind, setup, m)?;
    if setup.m.is_none() && run.sup_linf() > m {
        m = run.sup_linf();
        (ledger, run, horizon) = local_pass(u0, kind, setup, m)?;
    }
    let sup = sup_condition(run.sup_linf(), m);
    if !sup.pass {
        ledger.pass = false;
        ledger.failure.get_or_insert_with(|| sup.name.clone());
    }
    ledger.conditions.insert(0, sup);
    Ok(LocalReport {
        criterion: "local".into(),
        inputs: inputs(u0, kind, m, horizon, &run, Some(setup.reference)),
        ledger,
    })
}

/// Diagnostics report over one regularized run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub regularization: RegularizationKind,
    pub m: f64,
    pub horizon: f64,
    pub h: f64,
    pub constants: BoundConstants,
    pub checks: Vec<BoundCheckRecord>,
    pub pass: bool,
}

impl DiagnosticsReport {
    pub fn check(&self, name: &str) -> Option<&BoundCheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Gradient, Duhamel, smoothing and energy checks on the regularized run,
/// and the decay check on `t ≥ decay_from`. The decay check reads the
/// norms of the regularized run when `kind` is `None`, else of a same-grid
/// unregularized companion.
pub fn run_diagnostics(
    u0: &VectorField,
    kind: RegularizationKind,
    setup: &CertifySetup,
    constants: BoundConstants,
    decay_from: f64,
) -> Result<DiagnosticsReport> {
    let grid = *u0.grid();
    let h = step_for(u0, setup);
    let reg = Regularization::build(grid, kind)?;
    let m0 = setup.m.unwrap_or_else(|| linf_norm(u0));
    let mut mon = DiagnosticsMonitor::new(reg, m0, constants);
    let (_, hu) = uniform_steps(setup.horizon, h)?;
    let companion = (kind != RegularizationKind::None).then_some(ReferenceSpec { refine: 1, substeps: 1 });
    let run = run_twin(u0, setup.horizon, h, kind, companion, &setup.solve, |u, _| mon.observe(u, hu))?;
    let m = setup.m.unwrap_or(run.sup_linf());
    let mut mon_checks = mon.finish();
    if setup.m.is_none() && m != m0 {
        rescale_m(&mut mon_checks, m, kind.epsilon(), &constants);
    }
    let decay_norms = if run.reference_norms.is_empty() { &run.norms } else { &run.reference_norms };
    let mut checks = mon_checks;
    checks.push(decay_check(decay_norms, l2_norm(u0), constants.decay, decay_from));
    checks.push(energy_monitor(&run.norms, run.h));
    let pass = checks.iter().all(|c| c.pass);
    Ok(DiagnosticsReport { regularization: kind, m, horizon: setup.horizon, h: run.h, constants, checks, pass })
}

fn rescale_m(checks: &mut [BoundCheckRecord], m: f64, eps: f64, k: &BoundConstants) {
    for c in checks.iter_mut() {
        let rhs: Option<Vec<f64>> = match c.name.as_str() {
            "gradient" => Some(
                c.times
                    .iter()
                    .map(|&t| if t <= 0.0 { f64::INFINITY } else { k.gradient * (m * m).max(m / t.sqrt()) })
                    .collect(),
            ),
            "duhamel" => Some(vec![k.duhamel * eps * m * m; c.times.len()]),
            _ => None,
        };
        if let Some(rhs) = rhs {
            *c = BoundCheckRecord::new(&c.name, c.constant, c.times.clone(), std::mem::take(&mut c.lhs), rhs);
        }
    }
}

/// Constants that make every check pass on the given runs with margin
/// `safety`: each is `safety` times the worst ratio observed with unit
/// constants, or 1 when the bound is never active.
pub fn calibrate(runs: &[DiagnosticsReport], safety: f64) -> BoundConstants {
    let worst = |name: &str| {
        runs.iter().filter_map(|r| r.check(name)).map(|c| c.worst_ratio * c.constant).fold(0.0, f64::max)
    };
    let pick = |w: f64| if w > 0.0 { safety * w } else { 1.0 };
    BoundConstants {
        gradient: pick(worst("gradient")),
        duhamel: pick(worst("duhamel")),
        decay: pick(worst("decay")),
        mollification: pick(worst("mollification")),
    }
}

/// Dimensionless groups and verdicts of one run in a scaling pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSide {
    pub epsilon: f64,
    pub m: f64,
    pub horizon: f64,
    pub eps_m: f64,
    pub t_m2: f64,
    pub l2sq_m: f64,
    /// `ε` over the global threshold.
    pub global_ratio: f64,
    pub global_pass: bool,
    pub corollary_ratio: f64,
    pub corollary_pass: bool,
    pub ledger_pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub lambda: f64,
    pub base: ScalingSide,
    pub scaled: ScalingSide,
    /// Largest relative difference between the dimensionless groups.
    pub max_rel_diff: f64,
    pub verdicts_equal: bool,
}

fn scaling_side(u0: &VectorField, kind: RegularizationKind, horizon: f64, h: f64, setup: &CertifySetup) -> Result<ScalingSide> {
    let run = run_twin(u0, horizon, h, kind, None, &setup.solve, |_, _| Ok(()))?;
    let c = setup.constants;
    let m = run.sup_linf();
    let eps = kind.epsilon();
    let l2 = l2_norm(u0);
    let budget = plan_steps(m, horizon, setup.theta)?;
    let mu = c.mu1.unwrap_or(4.0 / (budget.theta * budget.theta));
    let g = evaluate_criterion_global(eps, m, horizon, c.delta1, mu)?;
    let co = evaluate_criterion_corollary(eps, m, l2, c.c1, c.c2)?;
    let ledger = run_global_induction(&budget, eps, m, c.c, None);
    Ok(ScalingSide {
        epsilon: eps,
        m,
        horizon,
        eps_m: eps * m,
        t_m2: horizon * m * m,
        l2sq_m: l2 * l2 * m,
        global_ratio: eps / g.threshold,
        global_pass: g.pass,
        corollary_ratio: eps / co.threshold,
        corollary_pass: co.pass,
        ledger_pass: ledger.pass,
    })
}

/// Run `u₀` and its rescaled copy `λu₀(λx)` on the box `L/λ` with
/// `ε/λ`, `T/λ²` and `h/λ²`, and compare the dimensionless groups and the
/// criterion verdicts.
pub fn scaling_invariance_check(u0: &VectorField, kind: RegularizationKind, setup: &CertifySetup, lambda: f64) -> Result<ScalingReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("scaling factor {lambda} must be positive and finite"));
    }
    let h = step_for(u0, setup);
    let (_, h) = uniform_steps(setup.horizon, h)?;
    let base = scaling_side(u0, kind, setup.horizon, h, setup)?;
    let v0 = u0.parabolic_rescale(lambda)?;
    let l2 = lambda * lambda;
    let scaled = scaling_side(&v0, kind.with_epsilon(kind.epsilon() / lambda), setup.horizon / l2, h / l2, setup)?;
    let rel = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
    let max_rel_diff = [
        rel(base.eps_m, scaled.eps_m),
        rel(base.t_m2, scaled.t_m2),
        rel(base.l2sq_m, scaled.l2sq_m),
        rel(base.global_ratio, scaled.global_ratio),
        rel(base.corollary_ratio, scaled.corollary_ratio),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let verdicts_equal = base.global_pass == scaled.global_pass
        && base.corollary_pass == scaled.corollary_pass
        && base.ledger_pass == scaled.ledger_pass;
    Ok(ScalingReport { lambda, base, scaled, max_rel_diff, verdicts_equal })
}
