use crate::bc::{BoundaryCondition, DiscreteSpace};
use crate::bubble::verify_closed_form;
use crate::duality::{dual_check, weak_duality_sweep};
use crate::error::Result;
use crate::grid::{GridKind, RadialGrid};
use crate::inequalities::h_function;
use crate::norms::{Seminorm, BC_TOL};
use crate::phi::{make_phi, PhiKind};
use crate::profile::Profile;
use crate::scenario::config::{ScenarioConfig, ScenarioName};
use crate::scenario::report::{Check, Report, ReportRow, Verdict};
use crate::sobolev::{eps_upper_bound, sobolev_constant_estimate, SobolevConstant};
use crate::solver::{solve, ProblemSpec, SolveResult};
use rayon::prelude::*;
use std::sync::Arc;
use std::time::Instant;

/// Closed-form oracle tolerance for `bubble_verify`.
pub const BUBBLE_TOL: f64 = 1e-4;
/// Window of radii compared by `bubble_verify`.
pub const BUBBLE_WINDOW: (f64, f64) = (0.05, 0.8);
/// Minimal relative gap for the strict-inequality scenarios.
pub const GAP_MARGIN: f64 = 1e-2;
/// Relative tolerance for the equality scenario at the finest level.
pub const EQUALITY_TOL: f64 = 1e-3;
/// Slack on the upper bound beyond the Sobolev-constant uncertainty.
pub const EPS_SLACK: f64 = 0.02;
/// Relative tolerance of the multiplier identity through `h′(1)`.
pub const IDENTITY_TOL: f64 = 1e-2;
pub const DUAL_GAP_TOL: f64 = 2e-2;
pub const WEAK_DUALITY_SLACK: f64 = 1e-6;
pub const WEAK_DUALITY_SAMPLES: usize = 200;
pub const HOLDER_TOL: f64 = 1e-8;
/// Levels used for the Sobolev constant inside solver scenarios.
pub const SOBOLEV_LEVELS: [usize; 4] = [50, 100, 200, 400];

/// One `(norm, level)` job: φ and the solves for the requested families.
struct Job {
    norm: f64,
    level: usize,
    nodes: usize,
    phi: Profile,
    dirichlet: Option<SolveResult>,
    navier: SolveResult,
}

impl Job {
    fn spec(&self, r: usize, bc: BoundaryCondition, cfg: &ScenarioConfig) -> Result<ProblemSpec> {
        Ok(ProblemSpec::new(r, bc, self.phi.clone())?.with_tolerances(cfg.tolerances))
    }

    fn converged(&self) -> bool {
        self.navier.converged && self.dirichlet.as_ref().is_none_or(|d| d.converged)
    }

    fn d(&self) -> &SolveResult {
        self.dirichlet.as_ref().expect("Dirichlet solve requested")
    }

    fn gap(&self) -> f64 {
        match &self.dirichlet {
            Some(d) if d.value != 0.0 => (d.value - self.navier.value) / d.value,
            Some(d) if d.value == self.navier.value => 0.0,
            _ => f64::NAN,
        }
    }
}

fn uniform_grid(dim: usize, nodes: usize) -> Result<Arc<RadialGrid>> {
    Ok(Arc::new(RadialGrid::new(dim, nodes, GridKind::Uniform)?))
}

fn run_jobs(cfg: &ScenarioConfig, kind: PhiKind, with_dirichlet: bool) -> Result<Vec<Job>> {
    let levels = cfg.levels();
    let tasks: Vec<(f64, usize, usize)> = cfg
        .norms()
        .into_iter()
        .flat_map(|norm| levels.iter().enumerate().map(move |(l, &n)| (norm, l, n)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(norm, level, nodes)| {
            let grid = uniform_grid(cfg.dim, nodes)?;
            let phi = make_phi(kind, norm, grid, cfg.r)?;
            let spec = ProblemSpec::new(cfg.r, BoundaryCondition::Navier, phi.clone())?.with_tolerances(cfg.tolerances);
            let navier = solve(&spec)?;
            let dirichlet = if with_dirichlet {
                Some(solve(&spec.with_bc(BoundaryCondition::Dirichlet))?)
            } else {
                None
            };
            Ok(Job { norm, level, nodes, phi, dirichlet, navier })
        })
        .collect()
}

fn solver_row(cfg: &ScenarioConfig, kind: PhiKind, job: &Job) -> ReportRow {
    let d = job.dirichlet.as_ref();
    let n = &job.navier;
    ReportRow {
        scenario: cfg.scenario.to_string(),
        dim: cfg.dim,
        r: cfg.r,
        phi_kind: kind.to_string(),
        phi_norm: job.norm,
        level: job.level,
        nodes: job.nodes,
        value_dirichlet: d.map_or(f64::NAN, |d| d.value),
        value_navier: n.value,
        gap: job.gap(),
        lambda: n.multiplier,
        constraint_res: d.map_or(n.constraint_residual, |d| d.constraint_residual.max(n.constraint_residual)),
        el_res: d.map_or(n.el_residual, |d| d.el_residual.max(n.el_residual)),
        converged: job.converged(),
        verdict: Verdict::Inconclusive,
    }
}

fn blank_row(cfg: &ScenarioConfig, kind: &str, norm: f64, level: usize, nodes: usize) -> ReportRow {
    ReportRow {
        scenario: cfg.scenario.to_string(),
        dim: cfg.dim,
        r: cfg.r,
        phi_kind: kind.to_string(),
        phi_norm: norm,
        level,
        nodes,
        value_dirichlet: f64::NAN,
        value_navier: f64::NAN,
        gap: f64::NAN,
        lambda: f64::NAN,
        constraint_res: f64::NAN,
        el_res: f64::NAN,
        converged: true,
        verdict: Verdict::Inconclusive,
    }
}

/// Groups jobs by target norm, preserving order.
fn by_norm(jobs: &[Job]) -> Vec<(f64, Vec<&Job>)> {
    let mut out: Vec<(f64, Vec<&Job>)> = Vec::new();
    for j in jobs {
        match out.iter_mut().find(|(n, _)| *n == j.norm) {
            Some((_, v)) => v.push(j),
            None => out.push((j.norm, vec![j])),
        }
    }
    out
}

fn fmt_list(xs: impl IntoIterator<Item = f64>) -> String {
    let v: Vec<String> = xs.into_iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", v.join(", "))
}

fn sign_matches(lambda: f64, norm: f64) -> bool {
    let expected = (1.0 - norm).signum();
    lambda.is_finite() && lambda != 0.0 && lambda.signum() == expected
}

fn gap_checks(checks: &mut Vec<Check>, groups: &[(f64, Vec<&Job>)]) {
    for (norm, js) in groups {
        let gaps: Vec<f64> = js.iter().map(|j| j.gap()).collect();
        checks.push(Check::assert(
            format!("gap_above_margin[norm={norm}]"),
            gaps.iter().all(|&g| g > GAP_MARGIN),
            format!("relative gaps {} vs margin {GAP_MARGIN}", fmt_list(gaps.iter().copied())),
        ));
        let (first, last) = (gaps[0], gaps[gaps.len() - 1]);
        checks.push(Check::assert(
            format!("gap_stable[norm={norm}]"),
            last >= 0.5 * first,
            format!("coarsest {first:.6e}, finest {last:.6e}"),
        ));
    }
}

fn bound_checks(checks: &mut Vec<Check>, cfg: &ScenarioConfig, groups: &[(f64, Vec<&Job>)], sob: &SobolevConstant) -> Result<()> {
    for (norm, js) in groups {
        let mut ok = true;
        let mut detail = Vec::new();
        for j in js {
            let spec = j.spec(cfg.r, BoundaryCondition::Navier, cfg)?;
            let bound = eps_upper_bound(&j.phi, sob, &spec)?;
            let limit = bound * (1.0 + EPS_SLACK + sob.uncertainty);
            ok &= j.navier.value <= limit;
            detail.push(format!("n={}: {:.6e} <= {:.6e}", j.nodes, j.navier.value, limit));
        }
        checks.push(Check::assert(format!("eps_upper_bound[norm={norm}]"), ok, detail.join("; ")));
    }
    Ok(())
}

fn gap_constant_sign(cfg: &ScenarioConfig, kind: PhiKind, rows: &mut Vec<ReportRow>, checks: &mut Vec<Check>, diag: &mut Vec<String>) -> Result<()> {
    let jobs = run_jobs(cfg, kind, true)?;
    rows.extend(jobs.iter().map(|j| solver_row(cfg, kind, j)));
    let groups = by_norm(&jobs);
    gap_checks(checks, &groups);
    for (norm, js) in &groups {
        let ok = js.iter().all(|j| j.navier.multiplier > 0.0 && j.d().multiplier > 0.0);
        let lams = js.iter().flat_map(|j| [j.d().multiplier, j.navier.multiplier]);
        checks.push(Check::assert(format!("multiplier_positive[norm={norm}]"), ok, format!("(D, N) pairs {}", fmt_list(lams))));
        let finest = js[js.len() - 1];
        let space = DiscreteSpace::new(finest.phi.grid().clone(), cfg.r, BoundaryCondition::Dirichlet)?;
        let res = space.residual(finest.navier.minimizer.values());
        checks.push(Check::assert(
            format!("navier_minimizer_outside_dirichlet[norm={norm}]"),
            res > 10.0 * BC_TOL,
            format!("Dirichlet boundary residual {res:.3e} vs {:.1e}", 10.0 * BC_TOL),
        ));
    }
    let sob = sobolev_constant_estimate(cfg.dim, cfg.r, &SOBOLEV_LEVELS)?;
    diag.push(format!("sobolev estimate {:.8e} ± {:.1}%", sob.estimate, 100.0 * sob.uncertainty));
    bound_checks(checks, cfg, &groups, &sob)
}

fn gap_orthogonal(cfg: &ScenarioConfig, kind: PhiKind, rows: &mut Vec<ReportRow>, checks: &mut Vec<Check>) -> Result<()> {
    let jobs = run_jobs(cfg, kind, true)?;
    rows.extend(jobs.iter().map(|j| solver_row(cfg, kind, j)));
    let groups = by_norm(&jobs);
    gap_checks(checks, &groups);
    for (norm, js) in &groups {
        let finest = js[js.len() - 1];
        let semi = Seminorm::from_grid(finest.phi.grid(), cfg.r);
        let ip = semi.inner(finest.navier.minimizer.values(), finest.phi.values());
        let expected_positive = *norm < 1.0;
        checks.push(Check::report(
            format!("pairing_sign[norm={norm}]"),
            (ip > 0.0) == expected_positive,
            format!("<u_theta, phi>_r = {ip:.6e}, expected {}", if expected_positive { "> 0" } else { "< 0" }),
        ));
    }
    Ok(())
}

fn equality(cfg: &ScenarioConfig, kind: PhiKind, rows: &mut Vec<ReportRow>, checks: &mut Vec<Check>) -> Result<()> {
    let jobs = run_jobs(cfg, kind, true)?;
    rows.extend(jobs.iter().map(|j| solver_row(cfg, kind, j)));
    for (norm, js) in by_norm(&jobs) {
        let gaps: Vec<f64> = js.iter().map(|j| j.gap().abs()).collect();
        let last = gaps[gaps.len() - 1];
        checks.push(Check::assert(
            format!("values_equal[norm={norm}]"),
            last < EQUALITY_TOL,
            format!("|S_theta - S_0| / S_0 = {} vs {EQUALITY_TOL}", fmt_list(gaps.iter().copied())),
        ));
        checks.push(Check::assert(
            format!("difference_decreasing[norm={norm}]"),
            gaps.windows(2).all(|w| w[1] <= w[0]),
            fmt_list(gaps.iter().copied()),
        ));
        let ok = js.iter().all(|j| j.navier.multiplier < 0.0 && j.d().multiplier < 0.0);
        let lams = js.iter().flat_map(|j| [j.d().multiplier, j.navier.multiplier]);
        checks.push(Check::assert(format!("multiplier_negative[norm={norm}]"), ok, format!("(D, N) pairs {}", fmt_list(lams))));
    }
    Ok(())
}

fn proposition_signs(cfg: &ScenarioConfig, kind: PhiKind, rows: &mut Vec<ReportRow>, checks: &mut Vec<Check>) -> Result<()> {
    let jobs = run_jobs(cfg, kind, true)?;
    rows.extend(jobs.iter().map(|j| solver_row(cfg, kind, j)));
    for (norm, js) in by_norm(&jobs) {
        let mut sign_ok = true;
        let mut id_err: f64 = 0.0;
        for j in &js {
            for (bc, s) in [(BoundaryCondition::Dirichlet, j.d()), (BoundaryCondition::Navier, &j.navier)] {
                if (norm - 1.0).abs() >= 0.1 && s.converged {
                    sign_ok &= sign_matches(s.multiplier, norm);
                }
                let spec = j.spec(cfg.r, bc, cfg)?;
                let (_, hp) = h_function(1.0, &s.minimizer, &j.phi, &spec)?;
                let rhs = s.multiplier / spec.exponent() * hp;
                id_err = id_err.max((s.value - rhs).abs() / s.value.abs().max(f64::MIN_POSITIVE));
            }
        }
        let lams = js.iter().flat_map(|j| [j.d().multiplier, j.navier.multiplier]);
        checks.push(Check::assert(format!("multiplier_sign[norm={norm}]"), sign_ok, format!("(D, N) pairs {}", fmt_list(lams))));
        checks.push(Check::assert(
            format!("energy_identity[norm={norm}]"),
            id_err < IDENTITY_TOL,
            format!("max relative error of ||u||_r^2 = (Lambda/2*) h'(1): {id_err:.3e}"),
        ));
    }
    Ok(())
}

fn norm_one(cfg: &ScenarioConfig, kind: PhiKind, rows: &mut Vec<ReportRow>, checks: &mut Vec<Check>) -> Result<()> {
    let jobs = run_jobs(cfg, kind, true)?;
    rows.extend(jobs.iter().map(|j| solver_row(cfg, kind, j)));
    let ok = jobs.iter().all(|j| {
        [j.d(), &j.navier]
            .iter()
            .all(|s| s.value.abs() < 1e-10 && s.minimizer.max_abs() == 0.0 && s.degenerate)
    });
    let vals = jobs.iter().flat_map(|j| [j.d().value, j.navier.value]);
    checks.push(Check::assert("trivial_minimizer", ok, format!("values {}", fmt_list(vals))));
    Ok(())
}

fn eps_bound(cfg: &ScenarioConfig, kind: PhiKind, rows: &mut Vec<ReportRow>, checks: &mut Vec<Check>, diag: &mut Vec<String>) -> Result<()> {
    let jobs = run_jobs(cfg, kind, true)?;
    rows.extend(jobs.iter().map(|j| solver_row(cfg, kind, j)));
    let sob = sobolev_constant_estimate(cfg.dim, cfg.r, &SOBOLEV_LEVELS)?;
    diag.push(format!("sobolev estimate {:.8e} ± {:.1}%", sob.estimate, 100.0 * sob.uncertainty));
    bound_checks(checks, cfg, &by_norm(&jobs), &sob)
}

fn bubble_verify(cfg: &ScenarioConfig, rows: &mut Vec<ReportRow>, checks: &mut Vec<Check>, diag: &mut Vec<String>) -> Result<()> {
    let eps = cfg.epsilon();
    let results = cfg
        .levels()
        .into_par_iter()
        .map(|n| verify_closed_form(cfg.dim, cfg.r, eps, n, BUBBLE_WINDOW))
        .collect::<Result<Vec<_>>>()?;
    for check in &results {
        for o in &check.orders {
            let mut row = blank_row(cfg, "bubble", eps, o.j, check.n_nodes);
            row.value_dirichlet = o.max_rel_err_derived;
            row.value_navier = o.max_rel_err_printed;
            rows.push(row);
        }
        checks.push(Check::assert(
            format!("closed_form_matches[n={}]", check.n_nodes),
            check.derived_passes(BUBBLE_TOL),
            format!("max errors {}", fmt_list(check.orders.iter().map(|o| o.max_rel_err_derived))),
        ));
        checks.push(Check::report(
            format!("printed_coefficients_match[n={}]", check.n_nodes),
            check.printed_passes(BUBBLE_TOL),
            format!("max errors {}", fmt_list(check.orders.iter().map(|o| o.max_rel_err_printed))),
        ));
    }
    if let Some(first) = results.first() {
        for d in first.table.defects() {
            diag.push(format!("coefficient (i={}, j={}): printed {}, derived {}", d.i, d.j, d.printed, d.derived));
        }
    }
    Ok(())
}

fn duality(cfg: &ScenarioConfig, kind: PhiKind, rows: &mut Vec<ReportRow>, checks: &mut Vec<Check>, diag: &mut Vec<String>) -> Result<()> {
    let jobs = run_jobs(cfg, kind, false)?;
    for (norm, js) in by_norm(&jobs) {
        if norm <= 1.0 {
            diag.push(format!("norm {norm} is outside the convex regime; duality checks are reported only"));
        }
        let mut beta_gaps = Vec::new();
        for j in &js {
            let spec = j.spec(cfg.r, BoundaryCondition::Navier, cfg)?;
            let rep = dual_check(&spec, &j.navier)?;
            let sweep = weak_duality_sweep(&spec, j.navier.value, WEAK_DUALITY_SAMPLES, WEAK_DUALITY_SLACK, cfg.seed)?;
            let mut row = solver_row(cfg, kind, j);
            row.value_dirichlet = 2.0 * rep.dual_value;
            row.gap = rep.relative_gap;
            rows.push(row);
            let assert = norm > 1.0;
            let mk = |name: String, ok: bool, detail: String| {
                if assert {
                    Check::assert(name, ok, detail)
                } else {
                    Check::report(name, ok, detail)
                }
            };
            let tag = format!("norm={norm},n={}", j.nodes);
            checks.push(mk(
                format!("weak_duality[{tag}]"),
                sweep.violations == 0,
                format!("{} of {} samples exceed primal/2 + {WEAK_DUALITY_SLACK}; max excess {:.3e}", sweep.violations, sweep.samples, sweep.max_excess),
            ));
            checks.push(mk(
                format!("witness_gap[{tag}]"),
                rep.relative_gap.abs() < DUAL_GAP_TOL,
                format!("relative duality gap {:.3e}", rep.relative_gap),
            ));
            checks.push(mk(
                format!("holder_attainment[{tag}]"),
                rep.holder.attainment_error() < HOLDER_TOL,
                format!("relative error {:.3e}", rep.holder.attainment_error()),
            ));
            let la = (rep.holder.closed_form - rep.multiplier_abs).abs() / rep.multiplier_abs;
            checks.push(Check::report(
                format!("representer_norm_is_multiplier[{tag}]"),
                la < DUAL_GAP_TOL,
                format!("||p~||_q' = {:.8e}, |Lambda| = {:.8e}", rep.holder.closed_form, rep.multiplier_abs),
            ));
            let closed = -j.navier.value;
            beta_gaps.push((rep.beta_theta - rep.beta_zero).abs() / closed.abs());
            if j.level + 1 == cfg.levels().len() {
                let worst = [rep.beta_theta, rep.beta_zero]
                    .iter()
                    .map(|b| (b - closed).abs() / closed.abs())
                    .fold(0.0, f64::max);
                checks.push(mk(
                    format!("beta_direct_matches_closed_form[{tag}]"),
                    worst < DUAL_GAP_TOL,
                    format!("beta_theta {:.8e}, beta_0 {:.8e}", rep.beta_theta, rep.beta_zero),
                ));
            }
        }
        checks.push(Check::report(
            format!("beta_difference_decreasing[norm={norm}]"),
            beta_gaps.windows(2).all(|w| w[1] <= w[0]),
            fmt_list(beta_gaps.iter().copied()),
        ));
    }
    Ok(())
}

fn sobolev(cfg: &ScenarioConfig, rows: &mut Vec<ReportRow>, checks: &mut Vec<Check>, diag: &mut Vec<String>) -> Result<()> {
    let sob = sobolev_constant_estimate(cfg.dim, cfg.r, &cfg.levels())?;
    for (l, level) in sob.levels.iter().enumerate() {
        let mut row = blank_row(cfg, "none", 0.0, l, level.nodes);
        row.value_dirichlet = level.value;
        row.converged = level.converged;
        rows.push(row);
    }
    let vals: Vec<f64> = sob.levels.iter().map(|l| l.value).collect();
    checks.push(Check::assert(
        "values_decrease_under_refinement",
        vals.windows(2).all(|w| w[1] <= w[0] + 1e-10),
        fmt_list(vals.iter().copied()),
    ));
    diag.push(format!(
        "estimate {:.8e} ± {:.1}%, tail ratio {:?}",
        sob.estimate,
        100.0 * sob.uncertainty,
        sob.tail_ratio
    ));
    Ok(())
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let kind = config.phi_kind();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut diagnostics = Vec::new();
    match config.scenario {
        ScenarioName::GapConstantSign => gap_constant_sign(config, kind, &mut rows, &mut checks, &mut diagnostics)?,
        ScenarioName::GapOrthogonal => gap_orthogonal(config, kind, &mut rows, &mut checks)?,
        ScenarioName::EqualityDirichlet => equality(config, kind, &mut rows, &mut checks)?,
        ScenarioName::PropositionSigns => proposition_signs(config, kind, &mut rows, &mut checks)?,
        ScenarioName::NormOne => norm_one(config, kind, &mut rows, &mut checks)?,
        ScenarioName::EpsBound => eps_bound(config, kind, &mut rows, &mut checks, &mut diagnostics)?,
        ScenarioName::BubbleVerify => bubble_verify(config, &mut rows, &mut checks, &mut diagnostics)?,
        ScenarioName::DualCheck => duality(config, kind, &mut rows, &mut checks, &mut diagnostics)?,
        ScenarioName::SobolevEstimate => sobolev(config, &mut rows, &mut checks, &mut diagnostics)?,
    }
    for r in rows.iter().filter(|r| !r.converged) {
        diagnostics.push(format!("solve at norm {} with {} nodes did not converge", r.phi_norm, r.nodes));
    }
    let verdict = Report::decide(&rows, &checks);
    for r in rows.iter_mut() {
        r.verdict = if r.converged { verdict } else { Verdict::Inconclusive };
    }
    Ok(Report {
        config: config.clone(),
        rows,
        checks,
        verdict,
        wall_time_s: start.elapsed().as_secs_f64(),
        diagnostics,
    })
}
