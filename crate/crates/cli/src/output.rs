//! Report and series writers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use nscert::diagnostics::BoundCheckRecord;
use nscert::solver::NormRecord;
use nscert::spectral::snapshot::{write_snapshot, Snapshot};
use nscert::spectral::VectorField;
use serde::Serialize;

use crate::error::CliError;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// `t, linf, l2, grad_l2`.
pub fn write_norms_csv(path: &Path, norms: &[NormRecord]) -> Result<(), CliError> {
    write_rows(path, &["t", "linf", "l2", "grad_l2"], norms.iter().map(|r| vec![r.t, r.linf, r.l2, r.grad_l2]))
}

/// `|k|, multiplier`.
pub fn write_multiplier_csv(path: &Path, table: &[(f64, f64)]) -> Result<(), CliError> {
    write_rows(path, &["k", "multiplier"], table.iter().map(|&(k, m)| vec![k, m]))
}

/// `t, lhs, rhs, ratio`.
pub fn write_check_csv(path: &Path, record: &BoundCheckRecord) -> Result<(), CliError> {
    write_rows(path, &["t", "lhs", "rhs", "ratio"], record.rows().into_iter().map(|(t, l, r, q)| vec![t, l, r, q]))
}

pub fn write_velocity_snapshot(path: &Path, u: &VectorField) -> Result<(), CliError> {
    let mut w = create(path)?;
    write_snapshot(&mut w, &Snapshot::of(u, u.time()))?;
    w.flush()?;
    Ok(())
}
