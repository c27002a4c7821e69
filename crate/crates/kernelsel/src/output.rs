//! CSV and metadata writers. Floats are written with 17 significant digits.

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use kernelsel_core::{ModelDiagnostic, RiskReport};

use crate::runner::{SectionPoint, SurfacePoint};
use crate::RunError;

pub const TABLE_HEADER: [&str; 12] = [
    "process",
    "family_x",
    "family_y",
    "n",
    "N",
    "pen_const",
    "risk_emp",
    "se_emp",
    "risk_l2",
    "se_l2",
    "risk_f",
    "se_f",
];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn writer_for(path: &Path) -> Result<csv::Writer<fs::File>, RunError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

pub fn write_table(path: &Path, reports: &[RiskReport]) -> Result<(), RunError> {
    let mut w = writer_for(path)?;
    w.write_record(TABLE_HEADER)?;
    for r in reports {
        w.write_record([
            r.process.to_string(),
            r.family_x.to_string(),
            r.family_y.to_string(),
            r.n.to_string(),
            r.replicates.to_string(),
            fmt_f64(r.pen_const),
            fmt_f64(r.mean_empirical),
            fmt_opt(r.se_empirical),
            fmt_f64(r.mean_l2),
            fmt_opt(r.se_l2),
            fmt_opt(r.mean_f),
            fmt_opt(r.se_f),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Distribution of selected `(D₁, D₂)` pairs per table cell.
pub fn write_selected_dims(path: &Path, reports: &[RiskReport]) -> Result<(), RunError> {
    let mut w = writer_for(path)?;
    w.write_record(["process", "family_x", "family_y", "n", "D1", "D2", "count"])?;
    for r in reports {
        for (&(d1, d2), &count) in &r.selected {
            w.write_record([
                r.process.to_string(),
                r.family_x.to_string(),
                r.family_y.to_string(),
                r.n.to_string(),
                d1.to_string(),
                d2.to_string(),
                count.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics(path: &Path, diagnostics: &[ModelDiagnostic]) -> Result<(), RunError> {
    let mut w = writer_for(path)?;
    w.write_record([
        "family_x", "family_y", "D1", "D2", "contrast", "penalty", "selected",
    ])?;
    for d in diagnostics {
        w.write_record([
            d.family_x.to_string(),
            d.family_y.to_string(),
            d.d1.to_string(),
            d.d2.to_string(),
            fmt_f64(d.contrast),
            fmt_f64(d.penalty),
            u8::from(d.selected).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_surface(path: &Path, rows: &[SurfacePoint]) -> Result<(), RunError> {
    let mut w = writer_for(path)?;
    w.write_record(["x", "y", "pi_true", "pi_hat"])?;
    for r in rows {
        w.write_record([
            fmt_f64(r.x),
            fmt_f64(r.y),
            fmt_f64(r.pi_true),
            fmt_f64(r.pi_hat),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_section(path: &Path, rows: &[SectionPoint]) -> Result<(), RunError> {
    let mut w = writer_for(path)?;
    w.write_record(["coordinate", "pi_true", "pi_hat"])?;
    for r in rows {
        w.write_record([fmt_f64(r.coordinate), fmt_f64(r.pi_true), fmt_f64(r.pi_hat)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Sidecar `key = value` file recording how an output was produced.
pub fn write_metadata(path: &Path, entries: &[(&str, String)]) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    for (k, v) in entries {
        writeln!(f, "{k} = {v}")?;
    }
    Ok(())
}
