//! JSON and CSV emission.

use std::fs;
use std::path::{Path, PathBuf};

use crate::combinatorics::CombinatoricsTable;
use crate::error::{Error, Result};

use super::Report;

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// One row per record.
pub fn records_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "statement",
        "setting",
        "function",
        "params",
        "kind",
        "lhs",
        "rhs",
        "remainder",
        "residual",
        "tolerance",
        "verdict",
        "sigma_power",
        "total_error_estimate",
        "panels",
        "converged",
        "note",
    ])
    .map_err(csv_err)?;
    for r in &report.records {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let kind = serde_json::to_value(r.kind).map_err(|e| Error::Io(e.to_string()))?;
        let verdict = serde_json::to_value(r.verdict).map_err(|e| Error::Io(e.to_string()))?;
        w.write_record([
            r.statement.clone(),
            r.setting.clone(),
            r.function.clone(),
            params.join(";"),
            kind.as_str().unwrap_or_default().to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.remainder.map(|v| v.to_string()).unwrap_or_default(),
            r.residual.to_string(),
            r.tolerance.to_string(),
            verdict.as_str().unwrap_or_default().to_string(),
            r.sigma_power.to_string(),
            r.quad_diagnostics.total_error_estimate.to_string(),
            r.quad_diagnostics.panels.to_string(),
            r.quad_diagnostics.converged.to_string(),
            r.note.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}

/// `k,m,O_km,a_k` for `1 ≤ m ≤ k ≤ k_max`.
pub fn combinatorics_csv(k_max: u32) -> Result<String> {
    let t = CombinatoricsTable::build(k_max)?;
    let mut s = String::from("k,m,O_km,a_k\n");
    for r in t.rows() {
        s.push_str(&format!("{},{},{},{}\n", r.k, r.m, r.o_km, r.a_k));
    }
    Ok(s)
}

/// Writes `report.json` and/or `records.csv` into `dir`, plus one CSV per
/// sweep (referenced from the report). Returns the written paths.
pub fn emit_outputs(report: &Report, dir: &Path, formats: &[String]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut out = Vec::new();
    for f in formats {
        match f.as_str() {
            "json" => out.push(write(dir.join("report.json"), &report.to_json()?)?),
            "csv" => out.push(write(dir.join("records.csv"), &records_csv(report)?)?),
            other => return Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
    for s in &report.sweeps {
        out.push(write(dir.join(&s.csv), &s.report.to_csv())?);
    }
    Ok(out)
}
