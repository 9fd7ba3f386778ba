//! Theorem-verification scenarios, sweeps and their CSV reports.

pub mod config;
pub mod report;
pub mod run;
pub mod sweep;

pub use config::{ScenarioConfig, ScenarioName};
pub use report::{emit_csv, parse_csv, Check, Report, ReportRow, Verdict, CSV_HEADER};
pub use run::run_scenario;
pub use sweep::{sweep, SweepAxis, SweepOutcome};
