use crate::error::{Error, Result};
use crate::scenario::config::ScenarioConfig;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const CSV_HEADER: &str =
    "scenario,N,r,phi_kind,phi_norm,level,nodes,value_dirichlet,value_navier,gap,lambda,constraint_res,el_res,converged,verdict";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Verdict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            "inconclusive" => Ok(Verdict::Inconclusive),
            _ => Err(Error::Parse(format!("unknown verdict `{s}`"))),
        }
    }
}

/// One line of the metrics table. Scenarios that do not solve the
/// constrained problem reuse the value columns; see the crate README.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub dim: usize,
    pub r: usize,
    pub phi_kind: String,
    pub phi_norm: f64,
    pub level: usize,
    pub nodes: usize,
    pub value_dirichlet: f64,
    pub value_navier: f64,
    pub gap: f64,
    pub lambda: f64,
    pub constraint_res: f64,
    pub el_res: f64,
    pub converged: bool,
    pub verdict: Verdict,
}

/// A single asserted (or merely reported) property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Reported checks never affect the verdict.
    pub asserted: bool,
    pub detail: String,
}

impl Check {
    pub fn assert(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, asserted: true, detail: detail.into() }
    }

    pub fn report(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, asserted: false, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ScenarioConfig,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub wall_time_s: f64,
    pub diagnostics: Vec<String>,
}

impl Report {
    /// Pass needs every asserted check; any unconverged row makes the run
    /// inconclusive instead.
    pub fn decide(rows: &[ReportRow], checks: &[Check]) -> Verdict {
        if rows.iter().any(|r| !r.converged) {
            Verdict::Inconclusive
        } else if checks.iter().filter(|c| c.asserted).all(|c| c.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn to_csv(&self) -> String {
        emit_csv(&self.rows)
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn row_line(r: &ReportRow) -> String {
    [
        r.scenario.clone(),
        r.dim.to_string(),
        r.r.to_string(),
        r.phi_kind.clone(),
        float(r.phi_norm),
        r.level.to_string(),
        r.nodes.to_string(),
        float(r.value_dirichlet),
        float(r.value_navier),
        float(r.gap),
        float(r.lambda),
        float(r.constraint_res),
        float(r.el_res),
        r.converged.to_string(),
        r.verdict.to_string(),
    ]
    .join(",")
}

pub fn emit_csv(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&row_line(r));
        out.push('\n');
    }
    out
}

fn field<T: FromStr>(s: &str, name: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("line {line}: bad {name} `{s}`")))
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::Parse("missing or unexpected CSV header".into())),
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let n = k + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 15 {
            return Err(Error::Parse(format!("line {n}: expected 15 fields, found {}", f.len())));
        }
        rows.push(ReportRow {
            scenario: f[0].to_string(),
            dim: field(f[1], "N", n)?,
            r: field(f[2], "r", n)?,
            phi_kind: f[3].to_string(),
            phi_norm: field(f[4], "phi_norm", n)?,
            level: field(f[5], "level", n)?,
            nodes: field(f[6], "nodes", n)?,
            value_dirichlet: field(f[7], "value_dirichlet", n)?,
            value_navier: field(f[8], "value_navier", n)?,
            gap: field(f[9], "gap", n)?,
            lambda: field(f[10], "lambda", n)?,
            constraint_res: field(f[11], "constraint_res", n)?,
            el_res: field(f[12], "el_res", n)?,
            converged: field(f[13], "converged", n)?,
            verdict: f[14].parse()?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(x: f64) -> ReportRow {
        ReportRow {
            scenario: "thm2_i".into(),
            dim: 5,
            r: 2,
            phi_kind: "constant_sign_bump".into(),
            phi_norm: 0.5,
            level: 1,
            nodes: 200,
            value_dirichlet: x,
            value_navier: f64::NAN,
            gap: -x / 3.0,
            lambda: f64::INFINITY,
            constraint_res: 1e-300,
            el_res: 0.0,
            converged: true,
            verdict: Verdict::Fail,
        }
    }

    #[test]
    fn header_and_termination() {
        let csv = emit_csv(&[row(1.0)]);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.ends_with('\n'));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn round_trip_is_exact() {
        let rows = vec![row(std::f64::consts::PI), row(-1.0 / 7.0), row(5e-324)];
        let back = parse_csv(&emit_csv(&rows)).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.value_dirichlet.to_bits(), b.value_dirichlet.to_bits());
            assert_eq!(a.gap.to_bits(), b.gap.to_bits());
            assert!(b.value_navier.is_nan());
            assert_eq!(a.lambda, b.lambda);
            assert_eq!(a.scenario, b.scenario);
            assert_eq!(a.verdict, b.verdict);
        }
    }

    #[test]
    fn verdict_rules() {
        let mut rows = vec![row(1.0)];
        let checks = vec![Check::assert("a", true, ""), Check::report("b", false, "")];
        assert_eq!(Report::decide(&rows, &checks), Verdict::Pass);
        rows[0].converged = false;
        assert_eq!(Report::decide(&rows, &checks), Verdict::Inconclusive);
    }
}
