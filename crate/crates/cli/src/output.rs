use serde::{Deserialize, Serialize};
use sdroots_core::indicial::{IndicialRoot, Side, SolutionForm};
use std::io::Write;
use std::path::Path;

use crate::args::Format;
use crate::CliError;

pub const SCHEMA: u32 = 1;

/// One catalog root as a flat table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub re: f64,
    pub im: f64,
    pub case: u8,
    pub origin_kind: String,
    pub j: usize,
    pub eigenvalue: f64,
    pub side: String,
    pub solution_form: String,
    pub jordan: bool,
    pub conformal_killing: bool,
    pub multiplicity: usize,
}

impl From<&IndicialRoot> for RootRecord {
    fn from(r: &IndicialRoot) -> Self {
        RootRecord {
            re: r.value.re,
            im: r.value.im,
            case: r.case_tag.index(),
            origin_kind: r.origin.kind.short().to_string(),
            j: r.origin.j,
            eigenvalue: r.origin.eigenvalue,
            side: match r.side {
                Side::Kernel => "kernel",
                Side::Cokernel => "cokernel",
                Side::Both => "both",
            }
            .to_string(),
            solution_form: match r.solution_form {
                SolutionForm::ZOnly => "z_only",
                SolutionForm::OmegaOnly => "omega_only",
                SolutionForm::Mixed => "mixed",
            }
            .to_string(),
            jordan: r.jordan,
            conformal_killing: r.conformal_killing,
            multiplicity: r.multiplicity,
        }
    }
}

/// A JSON document and the rows used for its CSV form.
pub struct Report<R: Serialize> {
    pub json: serde_json::Value,
    pub rows: Vec<R>,
}

pub fn render<R: Serialize>(report: &Report<R>, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &report.rows {
                w.serialize(r).map_err(|e| CliError::Internal(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::File(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}
