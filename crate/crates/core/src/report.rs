//! CSV and JSON tables shared by the verification and convergence runs.
//!
//! Output is deterministic: floats are written with 17 significant digits and
//! rows keep the order they were produced in. Wall-clock timings are the one
//! nondeterministic quantity, so they are only emitted on request.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{fit_rate, rate_guarantee_holds, ConvergenceReport, RateFit};
use crate::basis::{gamma_n_closed, gamma_n_grid, OperatorParams};
use crate::error::{Error, Result};
use crate::tensor::OperatorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown output format `{other}`"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// Float in scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn format_opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// A row type that can be written as CSV or JSON.
pub trait TableRow: Serialize {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

/// One row of the verify/converge schema. For verification runs the
/// `function` column holds the check id, `sup_error` the measured deviation
/// and `bound_rhs` the threshold it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub function: String,
    pub n: u32,
    pub mu: f64,
    pub d: usize,
    pub operator: OperatorKind,
    pub sup_error: f64,
    pub bound_rhs: f64,
    pub pass: bool,
    pub runtime_ms: Option<f64>,
}

impl TableRow for ReportRow {
    fn header() -> &'static [&'static str] {
        &["function", "n", "mu", "d", "operator", "sup_error", "bound_rhs", "pass", "runtime_ms"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.function.clone(),
            self.n.to_string(),
            format_float(self.mu),
            self.d.to_string(),
            self.operator.to_string(),
            format_float(self.sup_error),
            format_float(self.bound_rhs),
            self.pass.to_string(),
            format_opt(self.runtime_ms),
        ]
    }
}

/// One row of the gamma table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaRow {
    pub n: u32,
    pub mu: f64,
    pub gamma_closed: f64,
    pub gamma_grid: f64,
    pub n_gamma: f64,
    pub abs_dev_mu_over_8: f64,
}

impl GammaRow {
    pub fn compute(params: &OperatorParams, grid_resolution: usize) -> Result<Self> {
        let closed = gamma_n_closed(params);
        let grid = gamma_n_grid(params, grid_resolution)?;
        let n_gamma = params.n() as f64 * closed;
        Ok(Self {
            n: params.n(),
            mu: params.mu(),
            gamma_closed: closed,
            gamma_grid: grid,
            n_gamma,
            abs_dev_mu_over_8: (n_gamma - params.mu() / 8.0).abs(),
        })
    }
}

impl TableRow for GammaRow {
    fn header() -> &'static [&'static str] {
        &["n", "mu", "gamma_closed", "gamma_grid", "n_gamma", "abs_dev_mu_over_8"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            format_float(self.mu),
            format_float(self.gamma_closed),
            format_float(self.gamma_grid),
            format_float(self.n_gamma),
            format_float(self.abs_dev_mu_over_8),
        ]
    }
}

/// Per-function outcome of a convergence sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub function: String,
    pub mu: f64,
    pub d: usize,
    pub operator: OperatorKind,
    pub lip_alpha: Option<f64>,
    /// `fitted`, `floor-limited` or `insufficient`.
    pub rate_status: &'static str,
    pub fitted_rate: Option<f64>,
    pub rate_pass: Option<bool>,
    pub dominance: bool,
}

impl SummaryRow {
    /// Fits the rate over every record and checks dominance from
    /// [`DOMINANCE_MIN_N`] on. The rate guarantee is only judged for
    /// Hölder-tagged functions with a fitted slope.
    pub fn from_report(report: &ConvergenceReport) -> Self {
        let n_min = report.records().first().map_or(1, |r| r.n);
        let (rate_status, fitted_rate) = match fit_rate(report, n_min) {
            Ok(RateFit::Rate(s)) => ("fitted", Some(s)),
            Ok(RateFit::FloorLimited) => ("floor-limited", None),
            Err(_) => ("insufficient", None),
        };
        let rate_pass = match (fitted_rate, report.lip_alpha) {
            (Some(s), Some(alpha)) => Some(rate_guarantee_holds(s, alpha)),
            _ => None,
        };
        Self {
            function: report.f_name.clone(),
            mu: report.mu,
            d: report.d,
            operator: report.operator,
            lip_alpha: report.lip_alpha,
            rate_status,
            fitted_rate,
            rate_pass,
            dominance: report.dominance_holds(),
        }
    }

    pub fn pass(&self) -> bool {
        self.dominance && self.rate_pass != Some(false)
    }
}

impl TableRow for SummaryRow {
    fn header() -> &'static [&'static str] {
        &[
            "function",
            "mu",
            "d",
            "operator",
            "lip_alpha",
            "rate_status",
            "fitted_rate",
            "rate_pass",
            "dominance",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.function.clone(),
            format_float(self.mu),
            self.d.to_string(),
            self.operator.to_string(),
            format_opt(self.lip_alpha),
            self.rate_status.to_string(),
            format_opt(self.fitted_rate),
            self.rate_pass.map(|b| b.to_string()).unwrap_or_default(),
            self.dominance.to_string(),
        ]
    }
}

impl ConvergenceReport {
    /// Rows in the shared schema; `pass` is error <= bound.
    pub fn rows(&self, include_timing: bool) -> Vec<ReportRow> {
        self.records()
            .iter()
            .map(|r| ReportRow {
                function: self.f_name.clone(),
                n: r.n,
                mu: self.mu,
                d: self.d,
                operator: self.operator,
                sup_error: r.sup_error,
                bound_rhs: r.bound_rhs,
                pass: r.bound_holds(),
                runtime_ms: include_timing.then_some(r.runtime_ms),
            })
            .collect()
    }
}

/// Writes `rows` with a header (CSV) or as an array of objects (JSON).
pub fn write_table<R: TableRow, W: Write>(rows: &[R], format: OutputFormat, mut out: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(R::header())?;
            for row in rows {
                w.write_record(row.cells())?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")
        }
    }
}
