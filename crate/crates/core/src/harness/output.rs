//! Machine-readable result emission.
//!
//! CSV columns are fixed: `scheme, P_dB (or eta), trials, ser_mean,
//! ser_ci95, q_mean_linear, q_mean_dB, q_ci95_linear, seed`, with floats at
//! 10 significant digits. JSON mirrors the full result object including the
//! config echo. Output is deterministic for a given result.

use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{SweepResult, SimConfig};
use crate::theory::JointPerturbationTable;

/// Output encoding for the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

/// Floats rendered at 10 significant digits.
fn fmt_float(v: f64) -> String {
    format!("{v:.9e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

/// Renders a sweep result as CSV with the fixed column set.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "scheme,{},trials,ser_mean,ser_ci95,q_mean_linear,q_mean_dB,q_ci95_linear,seed\n",
        result.axis.column_name()
    ));
    for cell in &result.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            cell.scheme,
            fmt_float(cell.axis_value),
            cell.trials,
            fmt_opt(cell.ser_mean),
            fmt_opt(cell.ser_ci95),
            fmt_float(cell.q_mean_linear),
            fmt_float(cell.q_mean_db),
            fmt_float(cell.q_ci95_linear),
            result.seed,
        ));
    }
    out
}

/// Renders a sweep result as JSON (config echo included).
pub fn sweep_json(result: &SweepResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(result)?)
}

/// Renders a sweep result in the requested format.
pub fn render_sweep(result: &SweepResult, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(sweep_csv(result)),
        OutputFormat::Json => sweep_json(result),
    }
}

/// Writes pre-rendered content, wrapping failures with the path.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(content.as_bytes()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Joint-distribution report (the `table1` subcommand payload).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistributionReport {
    pub config: SimConfig,
    pub table: JointPerturbationTable,
}

/// CSV rows `u_r,l_r,probability` plus a trailing overflow row.
pub fn joint_distribution_csv(report: &JointDistributionReport) -> String {
    let mut out = String::from("u_r,l_r,probability\n");
    let t = &report.table;
    for (idx, &level) in t.symbol_levels.iter().enumerate() {
        for off in -1i64..=1 {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_float(level),
                off,
                fmt_float(t.prob(idx, off))
            ));
        }
    }
    out.push_str(&format!("overflow,,{}\n", fmt_float(t.overflow)));
    out
}

/// One closed-form curve sample (the `theory` subcommand payload).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub quantity: String,
    /// Transmit power in dB; absent for power-independent quantities.
    pub p_db: Option<f64>,
    pub value: f64,
}

/// Closed-form curves over the configured power grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub config: SimConfig,
    /// Spectral efficiency (bits) for the outage curve.
    pub r_bits: f64,
    /// |c|^2 constant in the outage threshold.
    pub c_mag2: f64,
    pub rows: Vec<TheoryRow>,
}

/// CSV rows `quantity,P_dB,value`.
pub fn theory_csv(report: &TheoryReport) -> String {
    let mut out = String::from("quantity,P_dB,value\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.quantity,
            fmt_opt(row.p_db),
            fmt_float(row.value)
        ));
    }
    out
}
