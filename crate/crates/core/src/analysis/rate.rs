use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::basis::OperatorParams;
use crate::error::{Error, Result};
use crate::tensor::{sup_error, Grid, OperatorKind, ScalarField};

use super::bounds::teoultimo_bound;
use super::modulus::ModulusSource;

/// Errors below this are treated as roundoff and excluded from rate fits.
pub const ROUNDOFF_FLOOR: f64 = 1e-10;
/// Minimum number of usable records for a rate fit.
pub const MIN_FIT_RECORDS: usize = 4;
/// Slack on the guaranteed decay order `-alpha/2`.
pub const RATE_SLACK: f64 = 0.1;
/// Degree from which bound dominance is a hard requirement.
pub const DOMINANCE_MIN_N: u32 = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub n: u32,
    pub sup_error: f64,
    pub bound_rhs: f64,
    pub runtime_ms: f64,
}

impl ConvergenceRecord {
    /// Error within the bound, or below [`ROUNDOFF_FLOOR`] (a bound of exactly
    /// zero, e.g. for fixed functions, is met up to roundoff).
    pub fn bound_holds(&self) -> bool {
        self.sup_error <= self.bound_rhs || self.sup_error < ROUNDOFF_FLOOR
    }
}

/// Per-degree errors and bounds for one function, sorted by `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub f_name: String,
    pub mu: f64,
    pub d: usize,
    pub operator: OperatorKind,
    pub lip_alpha: Option<f64>,
    records: Vec<ConvergenceRecord>,
}

impl ConvergenceReport {
    pub fn new(f_name: impl Into<String>, mu: f64, d: usize, operator: OperatorKind) -> Self {
        Self {
            f_name: f_name.into(),
            mu,
            d,
            operator,
            lip_alpha: None,
            records: Vec::new(),
        }
    }

    /// Inserts a record keeping the list sorted by `n`; an existing record
    /// for the same `n` is replaced.
    pub fn push(&mut self, record: ConvergenceRecord) {
        match self.records.binary_search_by_key(&record.n, |r| r.n) {
            Ok(i) => self.records[i] = record,
            Err(i) => self.records.insert(i, record),
        }
    }

    pub fn records(&self) -> &[ConvergenceRecord] {
        &self.records
    }

    /// Whether every record with `n >= DOMINANCE_MIN_N` satisfies error <= bound.
    pub fn dominance_holds(&self) -> bool {
        self.records
            .iter()
            .filter(|r| r.n >= DOMINANCE_MIN_N)
            .all(ConvergenceRecord::bound_holds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateFit {
    /// Least-squares slope of `ln(sup_error)` against `ln(n)`.
    Rate(f64),
    /// Too few records above the roundoff floor; no rate is asserted.
    FloorLimited,
}

impl RateFit {
    pub fn rate(self) -> Option<f64> {
        match self {
            RateFit::Rate(s) => Some(s),
            RateFit::FloorLimited => None,
        }
    }
}

/// Fits the log-log slope over records with `n >= n_min`.
pub fn fit_rate(report: &ConvergenceReport, n_min: u32) -> Result<RateFit> {
    let eligible: Vec<&ConvergenceRecord> = report.records.iter().filter(|r| r.n >= n_min).collect();
    if eligible.len() < MIN_FIT_RECORDS {
        return Err(Error::InsufficientRecords {
            needed: MIN_FIT_RECORDS,
            got: eligible.len(),
            n_min,
        });
    }
    let points: Vec<(f64, f64)> = eligible
        .iter()
        .filter(|r| r.sup_error >= ROUNDOFF_FLOOR)
        .map(|r| ((r.n as f64).ln(), r.sup_error.ln()))
        .collect();
    if points.len() < MIN_FIT_RECORDS {
        return Ok(RateFit::FloorLimited);
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    Ok(RateFit::Rate(sxy / sxx))
}

/// `slope <= -alpha/2 + RATE_SLACK`.
pub fn rate_guarantee_holds(slope: f64, alpha: f64) -> bool {
    slope <= -alpha / 2.0 + RATE_SLACK
}

/// Sup-grid error and bound for each degree in `n_list`.
///
/// The bound for the classical operator uses the same estimate with `mu = 0`.
pub fn convergence_sweep(
    f: &ScalarField,
    mu: f64,
    n_list: &[u32],
    grid: &Grid,
    kind: OperatorKind,
    source: &ModulusSource,
) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::new(f.name(), mu, f.d(), kind);
    report.lip_alpha = f.lip_alpha_hint();
    let bound_mu = match kind {
        OperatorKind::Classical => 0.0,
        OperatorKind::Exponential => mu,
    };
    for &n in n_list {
        let params = OperatorParams::new(n, mu, f.d())?;
        let start = Instant::now();
        let err = sup_error(f, &params, grid, kind)?;
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let bound = teoultimo_bound(f, &OperatorParams::new(n, bound_mu, f.d())?, source)?;
        report.push(ConvergenceRecord {
            n,
            sup_error: err,
            bound_rhs: bound,
            runtime_ms,
        });
    }
    Ok(report)
}
