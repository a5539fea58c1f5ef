//! Verb implementations.

use std::path::Path;

use nscert::constants::BoundConstants;
use nscert::pipeline::{
    calibrate, certify_corollary, certify_global, certify_local, default_step, run_diagnostics, run_twin, CertifySetup,
    DiagnosticsReport,
};
use nscert::regularization::{Regularization, RegularizationKind};
use nscert::scenario::{generate_initial_data, Scenario};
use nscert::solver::NormRecord;
use nscert::spectral::VectorField;
use serde::Serialize;

use crate::config::{RunConfig, Verb};
use crate::error::CliError;
use crate::output::{write_check_csv, write_json, write_multiplier_csv, write_norms_csv, write_velocity_snapshot};

/// Result of a verb that ran to completion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub verb: String,
    pub scenario: String,
    pub pass: bool,
    pub summary: String,
    /// Exit status this outcome maps to.
    pub status: i32,
}

impl Outcome {
    fn new(verb: Verb, scenario: &Scenario, pass: bool, gated: bool, summary: String) -> Self {
        let status = if gated && !pass { 1 } else { 0 };
        Self { verb: verb.name().into(), scenario: scenario.name(), pass, summary, status }
    }
}

fn initial_data(cfg: &RunConfig, scenario: &Scenario) -> Result<VectorField, CliError> {
    Ok(generate_initial_data(scenario, cfg.grid)?)
}

pub fn run_verb(verb: Verb, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match verb {
        Verb::Batch => batch(cfg),
        Verb::Calibrate => calibrate_verb(cfg),
        _ => run_one(verb, cfg, &cfg.scenario, &cfg.out_dir),
    }
}

fn run_one(verb: Verb, cfg: &RunConfig, scenario: &Scenario, out: &Path) -> Result<Outcome, CliError> {
    let u0 = initial_data(cfg, scenario)?;
    let kind = cfg.regularization;
    let setup = &cfg.setup;
    match verb {
        Verb::Simulate => simulate(cfg, scenario, &u0, out),
        Verb::CertifyGlobal | Verb::CertifyCorollary => {
            let (report, file) = if verb == Verb::CertifyGlobal {
                (certify_global(&u0, kind, setup)?, "global.json")
            } else {
                (certify_corollary(&u0, kind, setup)?, "corollary.json")
            };
            write_json(&out.join(file), &report)?;
            let summary = match &report.failure {
                None => format!("pass: threshold {:e}, bound {}", report.threshold, report.conclusion_bound),
                Some(f) => format!("fail: {f}"),
            };
            Ok(Outcome::new(verb, scenario, report.pass, true, summary))
        }
        Verb::CertifyLocal => {
            let report = certify_local(&u0, kind, setup)?;
            write_json(&out.join("local.json"), &report)?;
            let l = &report.ledger;
            let summary = match &l.failure {
                None => format!("pass: {} windows, {} cylinders", l.windows.len(), l.eps_reg.len()),
                Some(f) => format!("fail: {f}"),
            };
            Ok(Outcome::new(verb, scenario, l.pass, true, summary))
        }
        Verb::Diagnose => {
            let report = run_diagnostics(&u0, kind, setup, cfg.bound_constants, cfg.decay_from)?;
            write_diagnostics(out, &report)?;
            let worst: Vec<String> = report.checks.iter().map(|c| format!("{}={:.3}", c.name, c.worst_ratio)).collect();
            Ok(Outcome::new(verb, scenario, report.pass, true, worst.join(" ")))
        }
        Verb::Calibrate | Verb::Batch => unreachable!("handled by run_verb"),
    }
}

fn write_diagnostics(out: &Path, report: &DiagnosticsReport) -> Result<(), CliError> {
    write_json(&out.join("diagnostics.json"), report)?;
    for c in &report.checks {
        write_check_csv(&out.join(format!("diagnostics_{}.csv", c.name)), c)?;
    }
    Ok(())
}

fn simulate(cfg: &RunConfig, scenario: &Scenario, u0: &VectorField, out: &Path) -> Result<Outcome, CliError> {
    let kind = cfg.regularization;
    match Regularization::build(cfg.grid, kind)? {
        Regularization::None => {}
        Regularization::Leray(m) => write_multiplier_csv(&out.join("multiplier.csv"), &m.table())?,
        Regularization::Projection(c) => write_multiplier_csv(&out.join("multiplier.csv"), &c.table())?,
    }
    let h = cfg.setup.h.unwrap_or_else(|| default_step(u0, &cfg.setup.solve));
    let mut norms: Vec<NormRecord> = Vec::new();
    let mut step = 0usize;
    let every = cfg.snapshot_every;
    let result = run_twin(u0, cfg.setup.horizon, h, kind, None, &cfg.setup.solve, |u, _| {
        norms.push(NormRecord::of(u));
        if every > 0 && step % every == 0 {
            write_velocity_snapshot(&out.join(format!("snapshots/u_{step:06}.nscf")), u)
                .map_err(|e| nscert::Error::Io(std::io::Error::other(e.to_string())))?;
        }
        step += 1;
        Ok(())
    });
    write_norms_csv(&out.join("norms.csv"), &norms)?;
    let run = result?;
    write_velocity_snapshot(&out.join("final.nscf"), &run.final_state)?;
    let summary = format!("{} steps of h = {:e}, sup |u| = {:.6}", norms.len() - 1, run.h, run.sup_linf());
    Ok(Outcome::new(Verb::Simulate, scenario, true, false, summary))
}

/// Calibrated constants and the runs they came from.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub safety: f64,
    pub constants: BoundConstants,
    pub runs: Vec<(String, DiagnosticsReport)>,
}

/// Diagnostics with unit constants on the calibration scenarios.
pub fn calibration_pass(
    grid: nscert::spectral::Grid,
    scenarios: &[Scenario],
    kind: RegularizationKind,
    setup: &CertifySetup,
    decay_from: f64,
    safety: f64,
) -> Result<CalibrationReport, CliError> {
    let mut runs = Vec::new();
    for s in scenarios {
        let u0 = generate_initial_data(s, grid)?;
        runs.push((s.name(), run_diagnostics(&u0, kind, setup, BoundConstants::default(), decay_from)?));
    }
    let reports: Vec<DiagnosticsReport> = runs.iter().map(|r| r.1.clone()).collect();
    Ok(CalibrationReport { safety, constants: calibrate(&reports, safety), runs })
}

fn calibrate_verb(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rep = calibration_pass(
        cfg.grid,
        &cfg.calibration_scenarios,
        cfg.regularization,
        &cfg.setup,
        cfg.decay_from,
        cfg.calibration_safety,
    )?;
    write_json(&cfg.out_dir.join("bound_constants.json"), &rep.constants)?;
    write_json(&cfg.out_dir.join("calibration.json"), &rep)?;
    let k = rep.constants;
    let summary = format!(
        "gradient={:e} duhamel={:e} decay={:e} mollification={:e}",
        k.gradient, k.duhamel, k.decay, k.mollification
    );
    let first = cfg.calibration_scenarios.first().cloned().unwrap_or(Scenario::TaylorGreen);
    Ok(Outcome::new(Verb::Calibrate, &first, true, false, summary))
}

/// Run the configured verbs on every batch scenario, each in its own
/// subdirectory. Certification failures and blow-ups are recorded and the
/// batch continues; configuration and IO errors abort it.
fn batch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let mut status = 0;
    for s in &cfg.batch_scenarios {
        let dir = cfg.out_dir.join(s.name().replace([':', '/'], "_"));
        for &verb in &cfg.batch_verbs {
            let row = match run_one(verb, cfg, s, &dir) {
                Ok(o) => o,
                Err(e @ CliError::BlowUp { .. }) => Outcome {
                    verb: verb.name().into(),
                    scenario: s.name(),
                    pass: false,
                    summary: e.to_string(),
                    status: e.exit_code(),
                },
                Err(e) => return Err(e),
            };
            status = status.max(row.status);
            rows.push(row);
        }
    }
    write_json(&cfg.out_dir.join("batch.json"), &rows)?;
    let failed = rows.iter().filter(|r| r.status != 0).count();
    Ok(Outcome {
        verb: "batch".into(),
        scenario: format!("{} scenarios", cfg.batch_scenarios.len()),
        pass: failed == 0,
        summary: format!("{} runs, {failed} not ok", rows.len()),
        status,
    })
}
