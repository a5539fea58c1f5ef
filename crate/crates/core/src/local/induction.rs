use serde::{Deserialize, Serialize};

use super::coefficients::{coefficients, induction_alpha, CoefficientSet};
use super::eps_reg::{check_exponents, combine_terms, EpsRegValue};
use super::energy::{EnergyTracker, LocalEnergyWindow, WindowSpec};
use super::exponents::LocalExponents;
use super::pressure_osc::{forcing_pressure, OscillationKernel};
use super::recursion::{energy_recursion_check, RecursionCase};
use super::window::{point_of, CenterSet, IntervalIntegrals, OffsetStencil};
use crate::constants::CertificationConstants;
use crate::error::{domain, Result};
use crate::global::Condition;
use crate::regularization::Regularization;
use crate::solver::pressure_from_velocity;
use crate::spectral::{linf_norm, Convolver, Grid, ScalarField, SpectralField, Stencil, TensorField, VectorField};

/// Scales of the windowed induction: `r = κ/M`, `τ = θr²`,
/// `t_k = (k - 1)τ/N` and windows `k = N, …, K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalPlan {
    pub m: f64,
    pub kappa: f64,
    pub theta: f64,
    pub r: f64,
    pub tau: f64,
    pub n: usize,
    pub k: usize,
    pub horizon: f64,
}

impl LocalPlan {
    /// `t_k`, `k ≥ 1`.
    pub fn t(&self, k: usize) -> f64 {
        (k as f64 - 1.0) * self.tau / self.n as f64
    }

    /// Largest time step that lands on every `t_k`.
    pub fn step(&self) -> f64 {
        self.tau / self.n as f64
    }

    pub fn window_specs(&self) -> Vec<WindowSpec> {
        (self.n..=self.k).map(|k| WindowSpec { k, start: self.t(k + 1 - self.n), end: self.t(k) }).collect()
    }

    /// Cylinder intervals `(t_j - τ, t_j)` for `j = N + 1, …, K`.
    pub fn cylinder_intervals(&self) -> Vec<(usize, f64, f64)> {
        (self.n + 1..=self.k).map(|j| (j, self.t(j - self.n), self.t(j))).collect()
    }
}

/// Smallest admissible `N > 4C̄²/C₀` and the largest `θ ≤ θ_target` making
/// `K = N·TM²/(θκ²) + 1` an integer greater than `N`.
pub fn plan_local(m: f64, horizon: f64, kappa: f64, theta_target: f64, c: &CertificationConstants) -> Result<LocalPlan> {
    if !(m > 0.0 && horizon > 0.0) {
        return domain(format!("local plan needs M > 0 and T > 0 (got {m}, {horizon})"));
    }
    if !(kappa > 0.0 && kappa < 1.0 && theta_target > 0.0 && theta_target < 1.0) {
        return domain(format!("κ = {kappa} and θ = {theta_target} must lie in (0, 1)"));
    }
    if !(c.c0 > 0.0 && c.c_bar > 0.0) {
        return domain("C0 and C_bar must be positive");
    }
    let n = (4.0 * c.c_bar * c.c_bar / c.c0).floor() as usize + 1;
    let scale = n as f64 * horizon * m * m / (kappa * kappa);
    let raw = scale / theta_target;
    let mut steps = if (raw - raw.round()).abs() <= 1e-9 * raw { raw.round() } else { raw.ceil() };
    if steps < n as f64 {
        steps = n as f64;
    }
    let theta = scale / steps;
    let r = kappa / m;
    let tau = theta * r * r;
    Ok(LocalPlan { m, kappa, theta, r, tau, n, k: steps as usize + 1, horizon })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalParams {
    pub epsilon: f64,
    pub plan: LocalPlan,
    pub exponents: LocalExponents,
    pub constants: CertificationConstants,
    pub centers: CenterSet,
}

/// One time sample of the difference system: `v = u - u_ε`, its pressure
/// `q`, the drift `a = u_ε` and the sources `f`, `g`.
#[derive(Debug, Clone)]
pub struct LocalSample {
    pub t: f64,
    pub v: VectorField,
    pub q: ScalarField,
    pub a: VectorField,
    pub f: Option<VectorField>,
    pub g: Option<TensorField>,
}

impl LocalSample {
    /// Build the sample from a regularized state and a reference state. The
    /// reference is brought to the grid of `u_eps` first. The difference
    /// system carries `-div g_ε`.
    pub fn from_pair(t: f64, u_eps: &VectorField, reference: &VectorField, reg: &Regularization) -> Result<Self> {
        let grid = *u_eps.grid();
        let reference = if reference.grid() == &grid { reference.clone() } else { reference.resampled(grid)? };
        let v = reference.sub(u_eps)?;
        let g = reg.error_tensor(u_eps)?.scaled(-1.0);
        let q = pressure_from_velocity(&v, Some(u_eps), Some(&g), None)?;
        Ok(Self { t, v, q, a: u_eps.clone(), f: None, g: Some(g) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEntry {
    pub k: usize,
    pub t_k: f64,
    pub e_value: f64,
    /// `4^{k-N} 64α²`.
    pub bound: f64,
    pub e_start: f64,
    pub case: String,
    pub recursion_bound: f64,
    /// `e(t) ≤ e(c⁺) + αe^{1/2} + βe + γe^{3/2}` at every sample.
    pub recursion_inequality: bool,
    /// `e^{(k)}(t_{k-N+1}⁺) ≤ e^{(k-1)}(t_{k-N+1})`, from the second window on.
    pub handoff: Option<Condition>,
    pub oscillation: f64,
    pub oscillation_bound: f64,
    pub y_max: [f64; 3],
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalLedger {
    pub plan: LocalPlan,
    pub epsilon: f64,
    pub alpha: f64,
    pub coefficients: CoefficientSet,
    pub conditions: Vec<Condition>,
    pub windows: Vec<WindowEntry>,
    pub eps_reg: Vec<EpsRegValue>,
    /// Inequalities reported but not enforced.
    pub audit: Vec<Condition>,
    pub sup_u: f64,
    /// `2C̄M/(√θ κ)`.
    pub conclusion_bound: f64,
    pub pass: bool,
    pub failure: Option<String>,
    pub exponents: LocalExponents,
    pub constants: CertificationConstants,
}

/// Streams samples of the difference system and assembles the ledger.
pub struct LocalMonitor {
    params: LocalParams,
    grid: Grid,
    centers: Vec<usize>,
    energy: EnergyTracker,
    osc_kernel: OscillationKernel,
    osc: IntervalIntegrals,
    ball_conv: Convolver,
    ball_offsets: OffsetStencil,
    cyl: IntervalIntegrals,
    exps: (f64, f64, f64),
    sup_u: f64,
    last_t: f64,
    tol: f64,
}

impl LocalMonitor {
    pub fn new(grid: &Grid, params: LocalParams) -> Result<Self> {
        params.exponents.validate()?;
        let exps = check_exponents(&params.exponents)?;
        let plan = params.plan;
        let centers = params.centers.indices(grid)?;
        let tol = 1e-6 * plan.step();
        let specs = plan.window_specs();
        let energy = EnergyTracker::new(grid, plan.r, &params.centers, &specs, tol)?;
        let osc_kernel = OscillationKernel::new(grid, plan.r)?;
        let osc = IntervalIntegrals::new(1, centers.len(), specs.iter().map(|w| (w.start, w.end)).collect(), tol);
        let ball = Stencil::ball(grid, [0.0; 3], plan.r, 4)?;
        let cyl = IntervalIntegrals::new(
            5,
            centers.len(),
            plan.cylinder_intervals().iter().map(|c| (c.1, c.2)).collect(),
            tol,
        );
        Ok(Self {
            grid: *grid,
            centers,
            energy,
            osc_kernel,
            osc,
            ball_conv: Convolver::new(grid, &ball),
            ball_offsets: OffsetStencil::from_origin(grid, &ball),
            cyl,
            exps,
            sup_u: 0.0,
            last_t: f64::NEG_INFINITY,
            tol,
            params,
        })
    }

    pub fn observe(&mut self, s: &LocalSample) -> Result<()> {
        for w in [s.v.grid(), s.q.grid(), s.a.grid()] {
            w.check_same(&self.grid)?;
        }
        if s.t > self.params.plan.horizon + self.tol {
            return Ok(());
        }
        self.last_t = s.t;
        let u = s.a.add(&s.v)?;
        self.sup_u = self.sup_u.max(linf_norm(&u));
        self.energy.observe(s.t, &s.v)?;

        let q = s.q.to_physical();
        let p4 = s.f.as_ref().map(forcing_pressure);
        let dens = self.osc_kernel.densities(&q, p4.as_deref(), &self.centers);
        self.osc.push(s.t, vec![dens])?;

        let (m, q1, q2) = self.exps;
        let conv = |mag: Vec<f64>, e: f64| -> Vec<f64> {
            let pw: Vec<f64> = mag.iter().map(|x| x.powf(e)).collect();
            let full = self.ball_conv.apply(&pw);
            self.centers.iter().map(|&c| full[c].max(0.0)).collect()
        };
        let zeros = || vec![0.0; self.centers.len()];
        let iv = conv(s.v.magnitude(), 3.0);
        let iq: Vec<f64> = self
            .centers
            .iter()
            .map(|&c| {
                let qb = self.osc_kernel.q_bar(&q, p4.as_deref(), c);
                self.ball_offsets.apply_at(c, |i| (q[i] - qb).abs().powf(1.5))
            })
            .collect();
        let ia = conv(s.a.magnitude(), m);
        let if_ = s.f.as_ref().map_or_else(zeros, |f| conv(f.magnitude(), q1));
        let ig = s.g.as_ref().map_or_else(zeros, |g| conv(g.magnitude(), q2));
        self.cyl.push(s.t, vec![iv, iq, ia, if_, ig])
    }

    /// Assemble the ledger. Windows or cylinders never reached (for example
    /// after a blow-up) are recorded as failures.
    pub fn finish(self) -> LocalLedger {
        let p = &self.params;
        let plan = p.plan;
        let cst = &p.constants;
        let mut conditions = Vec::new();
        let mut audit = Vec::new();
        let co = coefficients(p.epsilon, plan.m, plan.kappa, plan.theta, &p.exponents, cst.c)
            .unwrap_or(CoefficientSet { alpha: f64::NAN, beta: f64::NAN, gamma: f64::NAN, alpha_p: f64::NAN, beta_p: f64::NAN, gamma_p: f64::NAN });
        let alpha = induction_alpha(p.epsilon, plan.m, plan.kappa, &p.exponents, cst.c);
        let (beta, gamma) = (co.beta, co.gamma);
        let rho = p.exponents.rho();
        let mu2 = cst.mu2.unwrap_or(2.0 * plan.n as f64 / (plan.kappa * plan.kappa * plan.theta * rho));
        let ln4 = 4f64.ln();

        conditions.push(Condition::less("4 C_bar^2 / C0 < N", 4.0 * cst.c_bar * cst.c_bar / cst.c0, plan.n as f64));
        conditions.push(Condition::at_most("theta kappa^2 <= C0", plan.theta * plan.kappa * plan.kappa, cst.c0));
        conditions.push(Condition::less("beta < 1/2", beta, 0.5));
        conditions.push(Condition::less("alpha gamma < 1/64", alpha * gamma, 1.0 / 64.0));
        let threshold_log = cst.delta2.ln() - plan.m.ln() - mu2 * plan.horizon * plan.m * plan.m;
        if p.epsilon > 0.0 {
            conditions.push(Condition::less_log(
                "epsilon <= delta2 M^-1 exp(-mu2 T M^2)",
                p.epsilon.ln(),
                threshold_log + 1e-12 * threshold_log.abs(),
            ));
            conditions.push(Condition::less_log(
                "4^(K-N) 64 alpha^2 < 1/(256 gamma^2)",
                (plan.k - plan.n) as f64 * ln4 + (64.0 * alpha * alpha).ln(),
                -(256.0 * gamma * gamma).ln(),
            ));
        } else {
            conditions.push(Condition::at_most("epsilon <= delta2 M^-1 exp(-mu2 T M^2)", 0.0, threshold_log.exp()));
            conditions.push(Condition::less("4^(K-N) 64 alpha^2 < 1/(256 gamma^2)", 0.0, 1.0 / (256.0 * gamma * gamma)));
        }
        let quarter = cst.eps0 * plan.theta / 4.0;
        audit.push(Condition::less("C theta kappa^6 < eps0 theta / 4", cst.c * plan.theta * plan.kappa.powi(6), quarter));
        audit.push(Condition::less("C kappa^(5/2) < eps0 theta / 4", cst.c * plan.kappa.powf(2.5), quarter));
        audit.push(Condition::less("C kappa^5 < eps0 theta / 4", cst.c * plan.kappa.powi(5), quarter));

        let conclusion_bound = 2.0 * cst.c_bar * plan.m / (plan.theta.sqrt() * plan.kappa);
        conditions.push(Condition::less("sup |u| < 2 C_bar M / (sqrt(theta) kappa)", self.sup_u, conclusion_bound));

        let specs = plan.window_specs();
        let energies = self.energy.finish_partial();
        let oscs = self.osc.finish_partial();
        let mut windows = Vec::new();
        let mut prev: Option<LocalEnergyWindow> = None;
        for ((spec, e), o) in specs.iter().zip(energies).zip(oscs) {
            let Some(e) = e else {
                windows.push(WindowEntry {
                    k: spec.k,
                    t_k: spec.end,
                    e_value: f64::NAN,
                    bound: f64::NAN,
                    e_start: f64::NAN,
                    case: "not reached".into(),
                    recursion_bound: f64::NAN,
                    recursion_inequality: false,
                    handoff: None,
                    oscillation: f64::NAN,
                    oscillation_bound: f64::NAN,
                    y_max: [f64::NAN; 3],
                    pass: false,
                });
                prev = None;
                continue;
            };
            let bound = 4f64.powi((spec.k - plan.n) as i32) * 64.0 * alpha * alpha;
            let rec = energy_recursion_check(e.e_start, alpha, beta, gamma);
            let rec_ok = !matches!(rec.case, RecursionCase::Fail(_)) && e.e_value <= rec.bound;
            let ineq = e.series.iter().all(|&(_, x)| {
                x <= e.e_start + alpha * x.sqrt() + beta * x + gamma * x.powf(1.5) + 1e-14 * x.max(e.e_start)
            });
            let handoff = prev.as_ref().map(|pw| {
                let rhs = pw
                    .series
                    .iter()
                    .filter(|(t, _)| *t <= spec.start + self.tol)
                    .map(|x| x.1)
                    .fold(0.0, f64::max);
                Condition::at_most("e(k)(t_{k-N+1}+) <= e(k-1)(t_{k-N+1})", e.e_start, rhs)
            });
            let osc = o.map(|o| o[0].iter().cloned().fold(0.0, f64::max)).unwrap_or(f64::NAN);
            let osc_bound = co.alpha_p + co.beta_p * e.e_value.powf(0.75) + co.gamma_p * e.e_value.powf(1.5);
            let pass = e.e_value <= bound
                && rec_ok
                && ineq
                && handoff.as_ref().is_none_or(|h| h.pass)
                && osc <= osc_bound;
            windows.push(WindowEntry {
                k: spec.k,
                t_k: spec.end,
                e_value: e.e_value,
                bound,
                e_start: e.e_start,
                case: match &rec.case {
                    RecursionCase::Fail(msg) => format!("fail: {msg}"),
                    c => c.label().to_string(),
                },
                recursion_bound: rec.bound,
                recursion_inequality: ineq,
                handoff,
                oscillation: osc,
                oscillation_bound: osc_bound,
                y_max: e.y_max,
                pass,
            });
            prev = Some(e);
        }

        let (m, q1, q2) = self.exps;
        let mut eps_reg = Vec::new();
        for ((_, _, tj), ints) in plan.cylinder_intervals().into_iter().zip(self.cyl.finish_partial()) {
            let threshold = plan.theta * cst.eps0;
            let Some(ints) = ints else {
                eps_reg.push(EpsRegValue {
                    z0: [f64::NAN, f64::NAN, f64::NAN, tj],
                    r: plan.r,
                    theta: plan.theta,
                    terms: [f64::NAN; 4],
                    value: f64::NAN,
                    threshold,
                    pass: false,
                });
                continue;
            };
            let mut best: Option<(usize, [f64; 4], f64)> = None;
            let mut term_sup = [0.0f64; 4];
            for c in 0..self.centers.len() {
                let terms = combine_terms(plan.r, [ints[0][c], ints[1][c], ints[2][c], ints[3][c], ints[4][c]], m, q1, q2);
                for (s, t) in term_sup.iter_mut().zip(terms) {
                    *s = s.max(t);
                }
                let v: f64 = terms.iter().sum();
                if best.as_ref().is_none_or(|b| v > b.2) {
                    best = Some((c, terms, v));
                }
            }
            let (c, terms, value) = best.expect("nonempty center set");
            let x = point_of(&self.grid, self.centers[c]);
            let pass = value < threshold && term_sup[1..].iter().all(|&t| t < threshold / 4.0);
            eps_reg.push(EpsRegValue { z0: [x[0], x[1], x[2], tj], r: plan.r, theta: plan.theta, terms, value, threshold, pass });
        }

        let failure = conditions
            .iter()
            .find(|c| !c.pass)
            .map(|c| c.name.clone())
            .or_else(|| windows.iter().find(|w| !w.pass).map(|w| format!("window {} fails ({})", w.k, w.case)))
            .or_else(|| {
                eps_reg.iter().find(|e| !e.pass).map(|e| format!("eps-regularity fails at t = {}", e.z0[3]))
            });
        LocalLedger {
            plan,
            epsilon: p.epsilon,
            alpha,
            coefficients: co,
            conditions,
            windows,
            eps_reg,
            audit,
            sup_u: self.sup_u,
            conclusion_bound,
            pass: failure.is_none(),
            failure,
            exponents: p.exponents,
            constants: *cst,
        }
    }
}

/// Run the windowed induction over stored samples.
pub fn run_local_induction(samples: &[LocalSample], params: LocalParams) -> Result<LocalLedger> {
    let Some(first) = samples.first() else {
        return domain("no samples for the local induction");
    };
    let mut mon = LocalMonitor::new(first.v.grid(), params)?;
    for s in samples {
        mon.observe(s)?;
    }
    Ok(mon.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_matches_hand_count() {
        let c = CertificationConstants::default();
        let p = plan_local(1.0, 0.00125, 0.25, 0.02, &c).unwrap();
        assert_eq!(p.n, 324);
        assert_eq!(p.k, 325);
        assert!((p.theta - 0.02).abs() < 1e-12);
        assert!((p.t(p.k) - 0.00125).abs() < 1e-15);
        assert_eq!(p.window_specs().len(), 2);
        assert_eq!(p.cylinder_intervals(), vec![(325, 0.0, p.t(325))]);
    }
}
