use crate::error::{Error, Result};
use crate::scenario::config::{ScenarioConfig, ScenarioName};
use crate::scenario::report::{emit_csv, Check, Report, ReportRow, Verdict};
use crate::scenario::run::run_scenario;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Epsilon,
    NormPhi,
    Grid,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::NormPhi => "norm_phi",
            SweepAxis::Grid => "grid",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epsilon" => Ok(SweepAxis::Epsilon),
            "norm_phi" => Ok(SweepAxis::NormPhi),
            "grid" => Ok(SweepAxis::Grid),
            _ => Err(Error::Parse(format!("unknown sweep axis `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub reports: Vec<Report>,
}

impl SweepOutcome {
    /// All rows of all reports in sweep order, under one header.
    pub fn to_csv(&self) -> String {
        let rows: Vec<ReportRow> = self.reports.iter().flat_map(|r| r.rows.iter().cloned()).collect();
        emit_csv(&rows)
    }
}

fn configure(base: &ScenarioConfig, axis: SweepAxis, value: f64) -> Result<ScenarioConfig> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::Epsilon => {
            if base.scenario != ScenarioName::BubbleVerify {
                return Err(Error::Config("the epsilon axis applies to bubble_verify only".into()));
            }
            cfg.epsilon = Some(value);
        }
        SweepAxis::NormPhi => cfg.phi_norm = Some(value),
        SweepAxis::Grid => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(Error::Config(format!("grid sweep values must be node counts, got {value}")));
            }
            cfg.levels = Some(vec![value as usize]);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn failed_report(cfg: ScenarioConfig, value: f64, err: &Error) -> Report {
    let row = ReportRow {
        scenario: cfg.scenario.to_string(),
        dim: cfg.dim,
        r: cfg.r,
        phi_kind: cfg.phi_kind().to_string(),
        phi_norm: cfg.phi_norm.unwrap_or(f64::NAN),
        level: 0,
        nodes: cfg.levels.as_ref().and_then(|l| l.first().copied()).unwrap_or(0),
        value_dirichlet: f64::NAN,
        value_navier: f64::NAN,
        gap: f64::NAN,
        lambda: f64::NAN,
        constraint_res: f64::NAN,
        el_res: f64::NAN,
        converged: false,
        verdict: Verdict::Fail,
    };
    Report {
        config: cfg,
        rows: vec![row],
        checks: vec![Check::assert("run_completed", false, format!("sweep value {value}: {err}"))],
        verdict: Verdict::Fail,
        wall_time_s: 0.0,
        diagnostics: vec![err.to_string()],
    }
}

/// Runs `base` once per value along `axis`; per-run errors become failed
/// reports rather than aborting the sweep.
pub fn sweep(base: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepOutcome> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    base.validate()?;
    let reports = values
        .par_iter()
        .map(|&v| match configure(base, axis, v) {
            Ok(cfg) => run_scenario(&cfg).unwrap_or_else(|e| failed_report(cfg, v, &e)),
            Err(e) => failed_report(base.clone(), v, &e),
        })
        .collect();
    Ok(SweepOutcome { axis, values: values.to_vec(), reports })
}
