//! Result rows and deterministic CSV/JSON emission.
//!
//! The CSV column set is fixed; every command maps its results onto it so
//! downstream tooling can concatenate files from different experiments.
//! Floats are written with Rust's shortest-roundtrip formatting, which is
//! deterministic, so identical (config, seed) pairs produce byte-identical
//! files.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: &str =
    "experiment,n,p,q,delta,t,distance,fidelity,anc_zero_prob,u_cond,naive_cost,speedup";

/// One result row in the fixed harness schema. Fields that do not apply to a
/// given experiment are zero.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Row {
    pub experiment: String,
    pub n: u32,
    pub p: u32,
    pub q: u32,
    pub delta: f64,
    pub t: i64,
    pub distance: f64,
    pub fidelity: f64,
    pub anc_zero_prob: f64,
    pub u_cond: u64,
    pub naive_cost: u64,
    pub speedup: f64,
}

impl Row {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.n,
            self.p,
            self.q,
            self.delta,
            self.t,
            self.distance,
            self.fidelity,
            self.anc_zero_prob,
            self.u_cond,
            self.naive_cost,
            self.speedup
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

pub fn render(rows: &[Row], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&row.csv_line());
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut out = serde_json::to_string_pretty(rows).expect("rows serialize");
            out.push('\n');
            out
        }
    }
}

/// Write to the path, or stdout when no path is given.
pub fn emit(rows: &[Row], format: Format, out: Option<&Path>) -> std::io::Result<()> {
    let text = render(rows, format);
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}
