//! Report assembly and emission in the three output formats.
//!
//! Human output is an aligned table with numerics truncated (not rounded) to
//! eight decimals; CSV uses the fixed schema
//! label,exact,numeric,empirical,deviation with quoted labels; JSON carries
//! exact values in structured form and numerics at full double precision.

use serde::{Deserialize, Serialize};

use crate::eulerprod::{truncate8, DensityValue, SpecialConstant};
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    pub rows: Vec<Row>,
    pub meta: Meta,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Row {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactValue>,
    pub numeric: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    /// Whether the value is conditional on the Riemann Hypothesis for the
    /// relevant number fields.
    pub grh: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExactValue {
    pub q0: String,
    pub q1: String,
    pub constant: Option<SpecialConstant>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct Meta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes: Option<u64>,
    pub grh_conditional: bool,
    pub runtime_ms: u128,
}

impl Row {
    pub fn exact_density(label: impl Into<String>, v: &DensityValue, grh: bool) -> Row {
        Row {
            label: label.into(),
            exact: Some(ExactValue::from(v)),
            numeric: v.numeric_f64(),
            empirical: None,
            deviation: None,
            grh,
        }
    }

    pub fn numeric_only(label: impl Into<String>, value: f64, grh: bool) -> Row {
        Row {
            label: label.into(),
            exact: None,
            numeric: value,
            empirical: None,
            deviation: None,
            grh,
        }
    }

    pub fn with_empirical(mut self, e: f64) -> Row {
        self.deviation = Some((self.numeric - e).abs());
        self.empirical = Some(e);
        self
    }
}

impl From<&DensityValue> for ExactValue {
    fn from(v: &DensityValue) -> ExactValue {
        ExactValue {
            q0: crate::arith::format_rat(&v.q0),
            q1: crate::arith::format_rat(&v.q1),
            constant: v.constant,
        }
    }
}

impl ExactValue {
    pub fn to_density(&self) -> Result<DensityValue> {
        let q0 = crate::arith::parse_rat(&self.q0)?;
        let q1 = crate::arith::parse_rat(&self.q1)?;
        Ok(match self.constant {
            None => DensityValue::rational(q0),
            Some(c) => DensityValue::new(q0, q1, c),
        })
    }

    fn display(&self) -> String {
        match self.to_density() {
            Ok(v) => v.exact_string(),
            Err(_) => String::from("?"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Format, String> {
        match s {
            "human" => Ok(Format::Human),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (human|csv|json)")),
        }
    }
}

/// Truncate a float to eight decimals, toward zero.
fn trunc8_f64(x: f64) -> String {
    let neg = x < 0.0;
    let scaled = (x.abs() * 1e8).floor() as i128;
    let int = scaled / 100_000_000;
    let frac = scaled % 100_000_000;
    format!("{}{}.{:08}", if neg { "-" } else { "" }, int, frac)
}

fn numeric_display(row: &Row) -> String {
    match &row.exact {
        // exact rows truncate from the rational, digit-exactly
        Some(e) => match e.to_density() {
            Ok(v) => truncate8(&v.numeric_rat()),
            Err(_) => trunc8_f64(row.numeric),
        },
        None => trunc8_f64(row.numeric),
    }
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Human => emit_human(report),
        Format::Csv => emit_csv(report),
        Format::Json => serde_json::to_string_pretty(report).expect("report serialization"),
    }
}

fn emit_human(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", report.command));
    if let Some(g) = &report.g {
        out.push_str(&format!("g = {g}\n"));
    }
    let mut grid: Vec<[String; 5]> = Vec::new();
    grid.push([
        "label".into(),
        "exact".into(),
        "numeric".into(),
        "empirical".into(),
        "deviation".into(),
    ]);
    for row in &report.rows {
        let mut label = row.label.clone();
        if row.grh {
            label.push_str(" (GRH)");
        }
        grid.push([
            label,
            row.exact.as_ref().map(|e| e.display()).unwrap_or_default(),
            numeric_display(row),
            row.empirical.map(trunc8_f64).unwrap_or_default(),
            row.deviation.map(|d| format!("{d:.2e}")).unwrap_or_default(),
        ]);
    }
    let mut width = [0usize; 5];
    for r in &grid {
        for (i, cell) in r.iter().enumerate() {
            width[i] = width[i].max(cell.len());
        }
    }
    let used: Vec<usize> = (0..5)
        .filter(|&i| i < 3 || grid[1..].iter().any(|r| !r[i].is_empty()))
        .collect();
    for r in &grid {
        let line: Vec<String> = used
            .iter()
            .map(|&i| format!("{:width$}", r[i], width = width[i]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out.push_str(&format!(
        "meta: {}{}grh_conditional={} runtime={}ms\n",
        report
            .meta
            .cutoff
            .map(|c| format!("cutoff={c} "))
            .unwrap_or_default(),
        report
            .meta
            .primes
            .map(|p| format!("primes={p} "))
            .unwrap_or_default(),
        report.meta.grh_conditional,
        report.meta.runtime_ms
    ));
    out
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn emit_csv(report: &Report) -> String {
    let mut out = String::from("label,exact,numeric,empirical,deviation\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_quote(&row.label),
            csv_quote(&row.exact.as_ref().map(|e| e.display()).unwrap_or_default()),
            numeric_display(row),
            row.empirical.map(|e| format!("{e}")).unwrap_or_default(),
            row.deviation.map(|d| format!("{d}")).unwrap_or_default(),
        ));
    }
    out
}
