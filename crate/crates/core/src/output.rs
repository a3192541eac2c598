//! Canonical CSV serialization of curve points plus the manifest sidecar.
//!
//! The CSV format is byte-stable: rows are sorted by (curve_id, snr_db),
//! floats carry nine significant digits, and parsing followed by
//! re-serialization reproduces a file exactly.

use std::path::Path;
use thiserror::Error;

use crate::config::RunManifest;
use crate::experiment::{CurveId, CurvePoint};

pub const CSV_HEADER: &str = "curve_id,snr_db,mean_rate_bps_hz,std_err,trials_used,outages";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("refusing to write an empty curve list")]
    EmptyCurves,

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed curve CSV at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Nine significant digits in scientific notation; round-trips through f64
/// parsing back to the same string.
pub fn format_float(x: f64) -> String {
    format!("{x:.8e}")
}

fn sorted(points: &[CurvePoint]) -> Vec<&CurvePoint> {
    let mut rows: Vec<&CurvePoint> = points.iter().collect();
    rows.sort_by(|a, b| {
        a.curve_id
            .as_str()
            .cmp(b.curve_id.as_str())
            .then(a.snr_db.partial_cmp(&b.snr_db).expect("snr values are finite"))
    });
    rows
}

/// Renders curve points as canonical CSV text.
pub fn curves_to_csv(points: &[CurvePoint]) -> Result<String, OutputError> {
    if points.is_empty() {
        return Err(OutputError::EmptyCurves);
    }
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in sorted(points) {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.curve_id,
            format_float(p.snr_db),
            format_float(p.mean_rate),
            format_float(p.std_err),
            p.trials_used,
            p.outages
        ));
    }
    Ok(out)
}

/// Writes the canonical CSV; no file is created for an empty list.
pub fn write_curves(points: &[CurvePoint], path: &Path) -> Result<(), OutputError> {
    let text = curves_to_csv(points)?;
    std::fs::write(path, text).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<(), OutputError> {
    std::fs::write(path, manifest.to_json()).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_curve_id(token: &str, line: usize) -> Result<CurveId, OutputError> {
    serde_json::from_value(serde_json::Value::String(token.to_string())).map_err(|_| {
        OutputError::Malformed { line, message: format!("unknown curve id {token:?}") }
    })
}

/// Parses CSV text produced by [`curves_to_csv`].
pub fn parse_curves_csv(text: &str) -> Result<Vec<CurvePoint>, OutputError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        other => {
            return Err(OutputError::Malformed {
                line: 1,
                message: format!("expected header {CSV_HEADER:?}, got {:?}", other.map(|o| o.1)),
            })
        }
    }
    let mut points = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(OutputError::Malformed {
                line: line_no,
                message: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str| -> Result<f64, OutputError> {
            s.parse().map_err(|_| OutputError::Malformed {
                line: line_no,
                message: format!("bad float {s:?}"),
            })
        };
        let parse_u = |s: &str| -> Result<usize, OutputError> {
            s.parse().map_err(|_| OutputError::Malformed {
                line: line_no,
                message: format!("bad count {s:?}"),
            })
        };
        points.push(CurvePoint {
            curve_id: parse_curve_id(fields[0], line_no)?,
            snr_db: parse_f(fields[1])?,
            mean_rate: parse_f(fields[2])?,
            std_err: parse_f(fields[3])?,
            trials_used: parse_u(fields[4])?,
            outages: parse_u(fields[5])?,
        });
    }
    Ok(points)
}
