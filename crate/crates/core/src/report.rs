//! Trace export and run comparison tables.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::drivers::{IterationRecord, RunTrace};
use crate::error::{Error, Result};
use crate::trust_region::Rho;

pub const CSV_HEADER: &str = "k,applied_input,reference,plant_value,grad_norm,rho,radius,accepted,cauchy_override";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::invalid("format", format!("expected csv or json, got {other:?}"))),
        }
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn vector(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

fn csv_row(out: &mut String, r: &IterationRecord) {
    let rho = match r.rho {
        Some(Rho::Ratio(x)) => num(x),
        Some(Rho::Degenerate) => "degenerate".to_string(),
        None => String::new(),
    };
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        r.k,
        r.applied_input.as_deref().map(vector).unwrap_or_default(),
        vector(&r.reference),
        num(r.plant_value),
        num(r.grad_norm),
        rho,
        r.radius.map(num).unwrap_or_default(),
        r.accepted,
        r.cauchy_override,
    );
}

/// One row per record. Absent values (the terminal record's step, ρ and
/// radius for basic-ma) are empty cells.
pub fn trace_to_csv(trace: &RunTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &trace.records {
        csv_row(&mut out, r);
    }
    out
}

pub fn trace_to_json(trace: &RunTrace) -> Result<String> {
    let mut s = serde_json::to_string_pretty(trace)?;
    s.push('\n');
    Ok(s)
}

pub fn trace_from_json(text: &str) -> Result<RunTrace> {
    Ok(serde_json::from_str(text)?)
}

pub fn render_trace(trace: &RunTrace, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Csv => Ok(trace_to_csv(trace)),
        ExportFormat::Json => trace_to_json(trace),
    }
}

pub fn export_trace(trace: &RunTrace, format: ExportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = render_trace(trace, format)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub problem: String,
    pub algorithm: String,
    pub status: String,
    pub iterations: usize,
    pub plant_evaluations: u64,
    pub final_grad_norm: f64,
    pub final_plant_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

const SUMMARY_COLUMNS: [&str; 7] = [
    "problem",
    "algorithm",
    "status",
    "iterations",
    "plant_evals",
    "final_grad_norm",
    "final_plant_value",
];

pub fn summarize(traces: &[RunTrace]) -> Summary {
    let rows = traces
        .iter()
        .map(|t| {
            let last = t.final_record();
            SummaryRow {
                problem: t.problem.clone(),
                algorithm: t.algorithm.to_string(),
                status: t.termination.to_string(),
                iterations: t.iterations(),
                plant_evaluations: t.plant_value_evaluations,
                final_grad_norm: last.map_or(f64::NAN, |r| r.grad_norm),
                final_plant_value: last.map_or(f64::NAN, |r| r.plant_value),
            }
        })
        .collect();
    Summary { rows }
}

impl Summary {
    fn cells(&self) -> Vec<[String; 7]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    r.problem.clone(),
                    r.algorithm.clone(),
                    r.status.clone(),
                    r.iterations.to_string(),
                    r.plant_evaluations.to_string(),
                    format!("{:.3e}", r.final_grad_norm),
                    format!("{:.6e}", r.final_plant_value),
                ]
            })
            .collect()
    }

    /// Aligned plain-text table; text columns left-aligned, numbers right-aligned.
    pub fn to_text(&self) -> String {
        let cells = self.cells();
        let mut widths = SUMMARY_COLUMNS.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |fields: [&str; 7]| {
            let mut s = String::new();
            for (i, (f, w)) in fields.iter().zip(widths).enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                if i < 3 {
                    let _ = write!(s, "{f:<w$}");
                } else {
                    let _ = write!(s, "{f:>w$}");
                }
            }
            s.trim_end().to_string()
        };
        let mut out = line(SUMMARY_COLUMNS);
        out.push('\n');
        out.push_str(&line(widths.map(|w| "-".repeat(w)).each_ref().map(String::as_str)));
        out.push('\n');
        for row in &cells {
            out.push_str(&line(row.each_ref().map(String::as_str)));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = SUMMARY_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.problem,
                r.algorithm,
                r.status,
                r.iterations,
                r.plant_evaluations,
                num(r.final_grad_norm),
                num(r.final_plant_value)
            );
        }
        out
    }
}

/// Runs independent configurations in parallel; results keep input order.
pub fn run_all(configs: &[RunConfig]) -> Vec<Result<RunTrace>> {
    configs.par_iter().map(RunConfig::execute).collect()
}
