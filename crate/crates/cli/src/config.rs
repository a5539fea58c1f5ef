//! Flat dotted-key run configuration.
//!
//! The file is TOML restricted to scalar and array values under dotted keys,
//! for example `grid.n = 32`. Every key is validated on load; unknown keys
//! are rejected so that typos do not silently fall back to defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nscert::constants::{BoundConstants, CertificationConstants};
use nscert::local::{CenterSet, LocalExponents};
use nscert::pipeline::{CertifySetup, ReferenceSpec};
use nscert::regularization::RegularizationKind;
use nscert::scenario::Scenario;
use nscert::solver::SolveOptions;
use nscert::spectral::{Exponent, Grid};

use crate::error::CliError;

/// Frozen diagnostic constants shipped with the tool.
pub const FROZEN_BOUND_CONSTANTS: &str = include_str!("../data/bound_constants.json");

pub fn frozen_bound_constants() -> BoundConstants {
    serde_json::from_str(FROZEN_BOUND_CONSTANTS).expect("frozen constants file is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Simulate,
    CertifyGlobal,
    CertifyLocal,
    CertifyCorollary,
    Diagnose,
    Calibrate,
    Batch,
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Simulate => "simulate",
            Verb::CertifyGlobal => "certify-global",
            Verb::CertifyLocal => "certify-local",
            Verb::CertifyCorollary => "certify-corollary",
            Verb::Diagnose => "diagnose",
            Verb::Calibrate => "calibrate",
            Verb::Batch => "batch",
        }
    }
}

impl FromStr for Verb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "simulate" => Verb::Simulate,
            "certify-global" => Verb::CertifyGlobal,
            "certify-local" => Verb::CertifyLocal,
            "certify-corollary" => Verb::CertifyCorollary,
            "diagnose" => Verb::Diagnose,
            "calibrate" => Verb::Calibrate,
            "batch" => Verb::Batch,
            other => return Err(format!("unknown verb {other:?}")),
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid: Grid,
    pub scenario: Scenario,
    pub regularization: RegularizationKind,
    pub setup: CertifySetup,
    pub bound_constants: BoundConstants,
    pub decay_from: f64,
    pub calibration_scenarios: Vec<Scenario>,
    pub calibration_safety: f64,
    pub batch_scenarios: Vec<Scenario>,
    pub batch_verbs: Vec<Verb>,
    pub out_dir: PathBuf,
    pub snapshot_every: usize,
}

/// Command-line overrides applied after the file is read.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub snapshot_every: Option<usize>,
}

struct Keys {
    map: BTreeMap<String, toml::Value>,
    used: Vec<String>,
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

fn bad(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config { key: key.to_string(), message: message.into() }
}

impl Keys {
    fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| bad("<file>", e.message().to_string()))?;
        let mut map = BTreeMap::new();
        flatten("", &table, &mut map);
        Ok(Self { map, used: Vec::new() })
    }

    fn take(&mut self, key: &str) -> Option<toml::Value> {
        self.used.push(key.to_string());
        self.map.get(key).cloned()
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(x)),
            Some(toml::Value::Integer(i)) => Ok(Some(i as f64)),
            Some(other) => Err(bad(key, format!("expected a number, found {other}"))),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn f64_req(&mut self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?.ok_or_else(|| bad(key, "missing required key"))
    }

    fn usize_opt(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if i >= 0 => Ok(Some(i as usize)),
            Some(other) => Err(bad(key, format!("expected a nonnegative integer, found {other}"))),
        }
    }

    fn str_opt(&mut self, key: &str) -> Result<Option<String>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(bad(key, format!("expected a string, found {other}"))),
        }
    }

    fn str_req(&mut self, key: &str) -> Result<String, CliError> {
        self.str_opt(key)?.ok_or_else(|| bad(key, "missing required key"))
    }

    fn list_opt(&mut self, key: &str) -> Result<Option<Vec<toml::Value>>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Array(a)) => Ok(Some(a)),
            Some(other) => Err(bad(key, format!("expected an array, found {other}"))),
        }
    }

    fn f64_triple(&mut self, key: &str, default: [f64; 3]) -> Result<[f64; 3], CliError> {
        let Some(list) = self.list_opt(key)? else { return Ok(default) };
        let vals: Option<Vec<f64>> = list
            .iter()
            .map(|v| match v {
                toml::Value::Float(x) => Some(*x),
                toml::Value::Integer(i) => Some(*i as f64),
                _ => None,
            })
            .collect();
        match vals {
            Some(v) if v.len() == 3 => Ok([v[0], v[1], v[2]]),
            _ => Err(bad(key, "expected three numbers")),
        }
    }

    fn str_list(&mut self, key: &str) -> Result<Option<Vec<String>>, CliError> {
        let Some(list) = self.list_opt(key)? else { return Ok(None) };
        list.into_iter()
            .map(|v| match v {
                toml::Value::String(s) => Ok(s),
                other => Err(bad(key, format!("expected strings, found {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn exponent(&mut self, key: &str, default: Exponent) -> Result<Exponent, CliError> {
        match self.take(key) {
            None => Ok(default),
            Some(toml::Value::String(s)) => Exponent::from_str(&s).map_err(|e| bad(key, e.to_string())),
            Some(toml::Value::Float(x)) => Exponent::finite(x).map_err(|e| bad(key, e.to_string())),
            Some(toml::Value::Integer(i)) => Exponent::finite(i as f64).map_err(|e| bad(key, e.to_string())),
            Some(other) => Err(bad(key, format!("expected an exponent, found {other}"))),
        }
    }

    fn finish(self) -> Result<(), CliError> {
        match self.map.keys().find(|k| !self.used.contains(k)) {
            Some(k) => Err(bad(k, "unknown key")),
            None => Ok(()),
        }
    }
}

/// Resolve a registry-style scenario name such as `taylor_green`,
/// `random_7` or `single_mode_1_2_0`.
pub fn scenario_by_name(name: &str) -> Option<Scenario> {
    if let Some(s) = Scenario::registry().into_iter().find(|s| s.name() == name) {
        return Some(s);
    }
    if let Some(seed) = name.strip_prefix("random_").and_then(|s| s.parse().ok()) {
        return Some(Scenario::Random { seed, k_max: 3.0, amplitude: 1.0 });
    }
    let parts: Vec<i64> = name.strip_prefix("single_mode_")?.split('_').map(|p| p.parse().ok()).collect::<Option<_>>()?;
    (parts.len() == 3).then(|| Scenario::SingleMode { mode: [parts[0], parts[1], parts[2]], amplitude: 1.0 })
}

fn scenario_list(keys: &mut Keys, key: &str, default: Vec<Scenario>) -> Result<Vec<Scenario>, CliError> {
    match keys.str_list(key)? {
        None => Ok(default),
        Some(names) => names
            .iter()
            .map(|n| scenario_by_name(n).ok_or_else(|| bad(key, format!("unknown scenario {n:?}"))))
            .collect(),
    }
}

fn positive(key: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(bad(key, format!("must be positive and finite (got {x})")))
    }
}

impl RunConfig {
    pub fn load(path: &Path, ov: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")), ov)
    }

    /// Parse configuration text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path, ov: &Overrides) -> Result<Self, CliError> {
        let mut k = Keys::parse(text)?;

        let n = k.usize_opt("grid.n")?.ok_or_else(|| bad("grid.n", "missing required key"))?;
        let box_length = k.f64_or("grid.box_length", 2.0 * std::f64::consts::PI)?;
        let grid = Grid::new(n, box_length).map_err(|e| bad("grid.n", e.to_string()))?;

        let scenario = match k.str_req("scenario.id")?.as_str() {
            "taylor_green" => Scenario::TaylorGreen,
            "taylor_green_3d" => Scenario::TaylorGreen3d,
            "random" => {
                let seed = k.usize_opt("scenario.seed")?.unwrap_or(1) as u64;
                let k_max = k.f64_or("scenario.k_max", 3.0)?;
                let amplitude = k.f64_or("scenario.amplitude", 1.0)?;
                Scenario::Random { seed: ov.seed.unwrap_or(seed), k_max, amplitude }
            }
            "single_mode" => {
                let m = k.f64_triple("scenario.mode", [f64::NAN; 3])?;
                if m.iter().any(|x| x.is_nan() || x.fract() != 0.0) {
                    return Err(bad("scenario.mode", "missing or non-integer mode triple"));
                }
                let amplitude = k.f64_or("scenario.amplitude", 1.0)?;
                Scenario::SingleMode { mode: [m[0] as i64, m[1] as i64, m[2] as i64], amplitude }
            }
            "file" => {
                let p = PathBuf::from(k.str_req("scenario.path")?);
                Scenario::File { path: if p.is_absolute() { p } else { base.join(p) } }
            }
            other => return Err(bad("scenario.id", format!("unknown scenario {other:?}"))),
        };

        let regularization = match k.str_req("regularization.kind")?.as_str() {
            "none" => RegularizationKind::None,
            kind @ ("leray" | "projection") => {
                let epsilon = positive("regularization.epsilon", k.f64_req("regularization.epsilon")?)?;
                if kind == "leray" {
                    RegularizationKind::Leray { epsilon }
                } else {
                    RegularizationKind::Projection { epsilon }
                }
            }
            other => return Err(bad("regularization.kind", format!("unknown regularization {other:?}"))),
        };

        let horizon = k.f64_req("run.horizon")?;
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(bad("run.horizon", format!("must be finite and nonnegative (got {horizon})")));
        }
        let h = match k.f64_opt("scheme.h")? {
            Some(h) => Some(positive("scheme.h", h)?),
            None => None,
        };
        let d = SolveOptions::default();
        let solve = SolveOptions {
            store_every: 0,
            ceiling: positive("scheme.ceiling", k.f64_or("scheme.ceiling", d.ceiling)?)?,
            cfl_factor: positive("scheme.cfl_factor", k.f64_or("scheme.cfl_factor", d.cfl_factor)?)?,
        };

        let dc = CertificationConstants::default();
        let constants = CertificationConstants {
            c: k.f64_or("constants.c", dc.c)?,
            c0: k.f64_or("constants.c0", dc.c0)?,
            delta1: k.f64_or("constants.delta1", dc.delta1)?,
            mu1: k.f64_opt("constants.mu1")?,
            delta2: k.f64_or("constants.delta2", dc.delta2)?,
            mu2: k.f64_opt("constants.mu2")?,
            c1: k.f64_or("constants.c1", dc.c1)?,
            c2: k.f64_or("constants.c2", dc.c2)?,
            c_t0: k.f64_or("constants.c_t0", dc.c_t0)?,
            eps0: k.f64_or("constants.eps0", dc.eps0)?,
            c_bar: k.f64_or("constants.c_bar", dc.c_bar)?,
        };

        let de = LocalExponents::regularization_default();
        let mut exponents = LocalExponents {
            q1: k.exponent("exponents.q1", de.q1)?,
            q2: k.exponent("exponents.q2", de.q2)?,
            nu: k.f64_triple("exponents.nu", de.nu)?,
            sigma: k.f64_triple("exponents.sigma", de.sigma)?,
            lambda: k.f64_triple("exponents.lambda", de.lambda)?,
            ..de
        };
        exponents.m_energy = k.f64_or("exponents.m_energy", de.m_energy)?;
        exponents.m_reg = k.f64_or("exponents.m_reg", de.m_reg)?;
        exponents.q1_surrogate = k.f64_or("exponents.q1_surrogate", de.q1_surrogate)?;
        exponents.q2_surrogate = k.f64_or("exponents.q2_surrogate", de.q2_surrogate)?;
        exponents.validate().map_err(|e| bad("exponents", e.to_string()))?;

        let ds = CertifySetup::default();
        let dr = ReferenceSpec::default();
        let stride = k.usize_opt("local.center_stride")?.unwrap_or(2);
        if stride == 0 {
            return Err(bad("local.center_stride", "must be positive"));
        }
        let m = match k.f64_opt("certify.m")? {
            Some(m) => Some(positive("certify.m", m)?),
            None => None,
        };
        let setup = CertifySetup {
            horizon,
            h,
            theta: positive("certify.theta", k.f64_or("certify.theta", ds.theta)?)?,
            kappa: positive("certify.kappa", k.f64_or("certify.kappa", ds.kappa)?)?,
            theta_local: positive("certify.theta_local", k.f64_or("certify.theta_local", ds.theta_local)?)?,
            m,
            reference: ReferenceSpec {
                refine: k.usize_opt("reference.refine")?.unwrap_or(dr.refine),
                substeps: k.usize_opt("reference.substeps")?.unwrap_or(dr.substeps),
            },
            solve,
            constants,
            exponents,
            centers: CenterSet::Stride(stride),
        };
        if setup.reference.refine == 0 || setup.reference.substeps == 0 {
            return Err(bad("reference.refine", "refine and substeps must be positive"));
        }

        let bound_constants = match k.str_opt("diagnostics.constants")? {
            None => frozen_bound_constants(),
            Some(p) => {
                let p = if Path::new(&p).is_absolute() { PathBuf::from(&p) } else { base.join(&p) };
                let text = std::fs::read_to_string(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| bad("diagnostics.constants", e.to_string()))?
            }
        };
        let decay_from = k.f64_or("diagnostics.decay_from", 0.0)?;
        let calibration_scenarios = scenario_list(
            &mut k,
            "calibrate.scenarios",
            vec![Scenario::TaylorGreen3d, Scenario::Random { seed: 1, k_max: 3.0, amplitude: 1.0 }],
        )?;
        let calibration_safety = positive("calibrate.safety", k.f64_or("calibrate.safety", 2.0)?)?;
        let batch_scenarios = scenario_list(&mut k, "batch.scenarios", vec![scenario.clone()])?;
        let batch_verbs = match k.str_list("batch.verbs")? {
            None => vec![Verb::Simulate, Verb::CertifyGlobal, Verb::Diagnose],
            Some(v) => v
                .iter()
                .map(|s| match s.parse::<Verb>() {
                    Ok(Verb::Batch) | Ok(Verb::Calibrate) => Err(bad("batch.verbs", format!("{s} cannot run inside a batch"))),
                    Ok(v) => Ok(v),
                    Err(e) => Err(bad("batch.verbs", e)),
                })
                .collect::<Result<_, _>>()?,
        };
        let out_dir = k.str_opt("output.dir")?.map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));
        let snapshot_every = k.usize_opt("output.snapshot_every")?.unwrap_or(0);
        k.finish()?;

        Ok(Self {
            grid,
            scenario,
            regularization,
            setup,
            bound_constants,
            decay_from,
            calibration_scenarios,
            calibration_safety,
            batch_scenarios,
            batch_verbs,
            out_dir: ov.out.clone().unwrap_or(out_dir),
            snapshot_every: ov.snapshot_every.unwrap_or(snapshot_every),
        })
    }
}
