use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use critsob::phi::{make_phi, PhiKind};
use critsob::scenario::{run_scenario, sweep, Report, ReportRow, ScenarioConfig, ScenarioName, SweepAxis, Verdict};
use critsob::solver::{solve, ProblemSpec, SolveResult};
use critsob::{BoundaryCondition, GridKind, RadialGrid};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "critsob", version, about = "Critical-exponent variational problems on the unit ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the constrained problem for both boundary families at each level.
    Solve(Common),
    /// Run one named scenario.
    Scenario {
        name: Option<ScenarioName>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a scenario once per value along an axis.
    Sweep {
        name: Option<ScenarioName>,
        #[arg(long)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the closed-form bubble Laplacians with finite differences.
    Bubble {
        #[arg(long)]
        epsilon: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Primal-dual check in the supercritical-norm regime.
    Dual(Common),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML file with ScenarioConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_dim: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    phi_kind: Option<PhiKind>,
    #[arg(long)]
    phi_norm: Option<f64>,
    /// Single grid level; shorthand for `--levels <n>`.
    #[arg(long, conflicts_with = "levels")]
    nodes: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Constraint tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl Common {
    /// File values first, then flags on top.
    fn resolve(&self, scenario: Option<ScenarioName>) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ScenarioConfig::from_toml(&text)?
            }
            None => {
                let Some(name) = scenario else { bail!("a scenario name or --config is required") };
                let (Some(dim), Some(r)) = (self.n_dim, self.order) else {
                    bail!("--n-dim and --order are required without --config")
                };
                ScenarioConfig::new(name, dim, r)
            }
        };
        if let Some(name) = scenario {
            cfg.scenario = name;
        }
        if let Some(dim) = self.n_dim {
            cfg.dim = dim;
        }
        if let Some(r) = self.order {
            cfg.r = r;
        }
        if self.phi_kind.is_some() {
            cfg.phi_kind = self.phi_kind;
        }
        if self.phi_norm.is_some() {
            cfg.phi_norm = self.phi_norm;
        }
        if let Some(n) = self.nodes {
            cfg.levels = Some(vec![n]);
        }
        if self.levels.is_some() {
            cfg.levels = self.levels.clone();
        }
        if let Some(tol) = self.tol {
            cfg.tolerances.constraint = tol;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.out.is_some() {
            cfg.output = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn solve_row(cfg: &ScenarioConfig, kind: PhiKind, norm: f64, level: usize, nodes: usize) -> Result<ReportRow> {
    let grid = Arc::new(RadialGrid::new(cfg.dim, nodes, GridKind::Uniform)?);
    let phi = make_phi(kind, norm, grid, cfg.r)?;
    let spec = ProblemSpec::new(cfg.r, BoundaryCondition::Navier, phi)?.with_tolerances(cfg.tolerances);
    let nav = solve(&spec)?;
    let dir = solve(&spec.with_bc(BoundaryCondition::Dirichlet))?;
    let converged = nav.converged && dir.converged;
    let gap = if dir.value != 0.0 { (dir.value - nav.value) / dir.value } else { 0.0 };
    let worst = |f: fn(&SolveResult) -> f64| f(&nav).max(f(&dir));
    Ok(ReportRow {
        scenario: "solve".into(),
        dim: cfg.dim,
        r: cfg.r,
        phi_kind: kind.to_string(),
        phi_norm: norm,
        level,
        nodes,
        value_dirichlet: dir.value,
        value_navier: nav.value,
        gap,
        lambda: nav.multiplier,
        constraint_res: worst(|s| s.constraint_residual),
        el_res: worst(|s| s.el_residual),
        converged,
        verdict: if converged { Verdict::Pass } else { Verdict::Inconclusive },
    })
}

fn run_solve(cfg: ScenarioConfig) -> Result<Report> {
    let start = Instant::now();
    let kind = cfg.phi_kind.unwrap_or(PhiKind::ConstantSignBump);
    let norms = cfg.phi_norm.map_or_else(|| vec![0.5], |n| vec![n]);
    let levels = cfg.levels();
    let mut rows = Vec::new();
    for &norm in &norms {
        for (level, &nodes) in levels.iter().enumerate() {
            rows.push(solve_row(&cfg, kind, norm, level, nodes)?);
        }
    }
    let verdict = Report::decide(&rows, &[]);
    Ok(Report { config: cfg, rows, checks: Vec::new(), verdict, wall_time_s: start.elapsed().as_secs_f64(), diagnostics: Vec::new() })
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(report: &Report, format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => report.to_csv(),
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
    })
}

fn exit_for(verdicts: impl IntoIterator<Item = Verdict>) -> ExitCode {
    let mut code = 0;
    for v in verdicts {
        match v {
            Verdict::Fail => return ExitCode::from(1),
            Verdict::Inconclusive => code = 2,
            Verdict::Pass => {}
        }
    }
    ExitCode::from(code)
}

fn single(report: Report, format: Format) -> Result<ExitCode> {
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check {} failed: {}", c.name, c.detail);
    }
    emit(&render(&report, format)?, report.config.output.as_deref())?;
    Ok(exit_for([report.verdict]))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(common) => {
            // The scenario field is irrelevant for a bare solve.
            let cfg = common.resolve(common.config.is_none().then_some(ScenarioName::GapConstantSign))?;
            single(run_solve(cfg)?, common.format)
        }
        Command::Scenario { name, common } => single(run_scenario(&common.resolve(name)?)?, common.format),
        Command::Bubble { epsilon, common } => {
            let mut cfg = common.resolve(Some(ScenarioName::BubbleVerify))?;
            if epsilon.is_some() {
                cfg.epsilon = epsilon;
                cfg.validate()?;
            }
            single(run_scenario(&cfg)?, common.format)
        }
        Command::Dual(common) => single(run_scenario(&common.resolve(Some(ScenarioName::DualCheck))?)?, common.format),
        Command::Sweep { name, axis, values, common } => {
            let cfg = common.resolve(name)?;
            let outcome = sweep(&cfg, axis, &values)?;
            let text = match common.format {
                Format::Csv => outcome.to_csv(),
                Format::Json => serde_json::to_string_pretty(&outcome)? + "\n",
            };
            emit(&text, cfg.output.as_deref())?;
            Ok(exit_for(outcome.reports.iter().map(|r| r.verdict)))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
