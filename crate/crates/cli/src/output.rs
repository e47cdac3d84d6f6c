//! CSV and JSON rendering, and all-or-nothing file writes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use steerlab_core::criteria::{Criterion, SteeringVerdict, SweepRow, TableRow, VerdictSource};

use crate::settings::Format;
use crate::CliError;

pub const SCHEMA_LINE: &str = "# steerlab-schema v1";

/// One verdict row; the CSV columns are the field order.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictRecord {
    pub family: String,
    pub param: f64,
    pub criterion: Criterion,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub steerable: Option<bool>,
    pub clamped_mass: Option<f64>,
    pub grid_n: Option<usize>,
    pub box_halfwidth: Option<f64>,
    pub source: &'static str,
    pub status: String,
}

impl VerdictRecord {
    pub fn ok(family: String, param: f64, v: &SteeringVerdict) -> Self {
        let (source, grid_n, box_halfwidth) = match v.source {
            VerdictSource::Analytic => ("analytic", None, None),
            VerdictSource::Quadrature { grid_n, half_width } => ("quadrature", Some(grid_n), Some(half_width)),
            VerdictSource::MatrixAlgebra => ("matrix", None, None),
        };
        Self {
            family,
            param,
            criterion: v.criterion,
            lhs: Some(v.lhs),
            rhs: Some(v.rhs),
            ratio: Some(v.ratio),
            steerable: Some(v.steerable),
            clamped_mass: Some(v.clamped_mass),
            grid_n,
            box_halfwidth,
            source,
            status: "ok".into(),
        }
    }

    pub fn failed(family: String, param: f64, criterion: Criterion, error: &str) -> Self {
        Self {
            family,
            param,
            criterion,
            lhs: None,
            rhs: None,
            ratio: None,
            steerable: None,
            clamped_mass: None,
            grid_n: None,
            box_halfwidth: None,
            source: "",
            status: format!("failed: {error}"),
        }
    }

    pub fn from_sweep(row: &SweepRow) -> Self {
        match &row.outcome {
            Ok(v) => Self::ok(row.family.clone(), row.param, v),
            Err(e) => Self::failed(row.family.clone(), row.param, row.criterion, e),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// One row of a ratio table in wide format.
#[derive(Debug, Clone, Serialize)]
pub struct TableRecord {
    pub family: String,
    pub param: f64,
    pub reid: Option<f64>,
    pub entropic: Option<f64>,
    pub sum: Option<f64>,
    pub clamped_mass: Option<f64>,
    pub grid_n: Option<usize>,
    pub box_halfwidth: Option<f64>,
    pub status: String,
}

impl TableRecord {
    pub fn new(family: String, row: &Result<TableRow, (f64, String)>) -> Self {
        match row {
            Ok(r) => Self {
                family,
                param: r.param,
                reid: Some(r.reid),
                entropic: Some(r.entropic),
                sum: Some(r.sum),
                clamped_mass: Some(r.clamped_mass),
                grid_n: Some(r.grid_n),
                box_halfwidth: Some(r.box_halfwidth),
                status: "ok".into(),
            },
            Err((param, e)) => Self {
                family,
                param: *param,
                reid: None,
                entropic: None,
                sum: None,
                clamped_mass: None,
                grid_n: None,
                box_halfwidth: None,
                status: format!("failed: {e}"),
            },
        }
    }
}

/// Renders records as schema-tagged CSV or a pretty JSON array.
pub fn render<T: Serialize>(records: &[T], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(records).map_err(|e| CliError::Io(e.to_string()))?;
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Csv => {
            let mut buf = Vec::new();
            writeln!(buf, "{SCHEMA_LINE}").expect("write to Vec");
            let mut w = csv::Writer::from_writer(buf);
            for r in records {
                w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Two-column `x ratio` plot data for one criterion; failed rows are skipped.
pub fn plot_data(param_name: &str, records: &[&VerdictRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    writeln!(buf, "# {param_name} ratio").expect("write to Vec");
    for r in records {
        if let Some(ratio) = r.ratio {
            writeln!(buf, "{} {}", r.param, ratio).expect("write to Vec");
        }
    }
    buf
}

/// Writes via a sibling temporary file and a rename, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
