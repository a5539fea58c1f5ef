use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nscert_cli::{run_verb, Overrides, RunConfig, Verb};

#[derive(Parser)]
#[command(name = "nscert", version, about = "Regularized Navier-Stokes runs with regularity certificates")]
struct Cli {
    #[command(subcommand)]
    verb: Command,
    /// Run configuration (dotted keys, TOML syntax).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random scenarios; overrides `scenario.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write a snapshot every K steps; overrides `output.snapshot_every`.
    #[arg(long, global = true, value_name = "K")]
    snapshot_every: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate and write norms, snapshots and the regularization multiplier.
    Simulate,
    /// Global criterion and step ledger.
    CertifyGlobal,
    /// Windowed local-energy induction and ε-regularity checks.
    CertifyLocal,
    /// Corollary criterion over T0.
    CertifyCorollary,
    /// Empirical bound checks.
    Diagnose,
    /// Fit the diagnostic constants on the calibration scenarios.
    Calibrate,
    /// Run several verbs over several scenarios.
    Batch,
}

impl From<Command> for Verb {
    fn from(c: Command) -> Verb {
        match c {
            Command::Simulate => Verb::Simulate,
            Command::CertifyGlobal => Verb::CertifyGlobal,
            Command::CertifyLocal => Verb::CertifyLocal,
            Command::CertifyCorollary => Verb::CertifyCorollary,
            Command::Diagnose => Verb::Diagnose,
            Command::Calibrate => Verb::Calibrate,
            Command::Batch => Verb::Batch,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ov = Overrides { out: cli.out, seed: cli.seed, snapshot_every: cli.snapshot_every };
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path, &ov),
        None => RunConfig::parse("", std::path::Path::new("."), &ov),
    };
    let result = cfg.and_then(|cfg| run_verb(cli.verb.into(), &cfg));
    match result {
        Ok(o) => {
            println!("{} [{}]: {}", o.verb, o.scenario, o.summary);
            ExitCode::from(o.status as u8)
        }
        Err(e) => {
            eprintln!("nscert: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
