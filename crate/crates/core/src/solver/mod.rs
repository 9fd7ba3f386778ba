//! Constrained minimization of `‖u‖_r^2` subject to `‖u + φ‖_{L^{2*}} = 1`.

pub mod augmented;
pub mod diagnostics;
pub mod kkt;
pub mod lbfgs;
pub mod space;

pub use augmented::AugmentedLagrangian;
pub use diagnostics::{constraint_pairing, el_residual, lagrange_multiplier_identity, ElResidual};
pub use space::ReducedProblem;

use crate::bc::BoundaryCondition;
use crate::bubble::{bubble_eval, BubbleSpec, Cutoff};
use crate::error::{Error, Result};
use crate::norms::{critical_exponent, lp_norm, lp_power};
use crate::profile::Profile;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Bound on `|‖u+φ‖_{2*} − 1|`.
    pub constraint: f64,
    /// Bound on the whitened KKT stationarity.
    pub gradient: f64,
    /// Bound on the normalized Euler–Lagrange residual.
    pub el: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { constraint: 1e-8, gradient: 1e-7, el: 1e-4, max_outer: 40, max_inner: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub dim: usize,
    pub r: usize,
    pub bc: BoundaryCondition,
    pub phi: Profile,
    pub tol: Tolerances,
}

impl ProblemSpec {
    pub fn new(r: usize, bc: BoundaryCondition, phi: Profile) -> Result<Self> {
        let dim = phi.grid().dim();
        if r == 0 {
            return Err(Error::InvalidArgument("order r must be positive".into()));
        }
        critical_exponent(dim, r)?;
        Ok(ProblemSpec { dim, r, bc, phi, tol: Tolerances::default() })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_bc(&self, bc: BoundaryCondition) -> Self {
        ProblemSpec { bc, ..self.clone() }
    }

    /// `2* = 2N / (N − 2r)`.
    pub fn exponent(&self) -> f64 {
        2.0 * self.dim as f64 / (self.dim as f64 - 2.0 * self.r as f64)
    }

    pub fn phi_norm(&self) -> f64 {
        lp_norm(&self.phi, self.exponent()).expect("exponent exceeds one")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub label: String,
    pub value: f64,
    pub multiplier: f64,
    pub constraint_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub value: f64,
    pub minimizer: Profile,
    /// `Λ` in `(−Δ)^r u = Λ|u+φ|^{2*−2}(u+φ)`; NaN when degenerate.
    pub multiplier: f64,
    /// `Λ` recomputed from the multiplier identity, when defined.
    pub multiplier_identity: Option<f64>,
    pub constraint_residual: f64,
    pub el_residual: f64,
    pub natural_bc_residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub degenerate: bool,
    pub starts: Vec<StartSummary>,
}

/// Threshold below which `|‖φ‖ − 1|` short-circuits to the trivial minimizer.
pub const NORM_ONE_TOL: f64 = 1e-10;

struct Candidate {
    label: String,
    c: Vec<f64>,
    lambda_g: f64,
    constraint_residual: f64,
    stationarity: f64,
    iterations: usize,
}

/// Scale `s` with `‖s d + φ‖_p = 1` closest to zero, if one exists on a scan.
fn feasible_scale(problem: &ReducedProblem, d: &[f64], phi: &[f64]) -> Option<f64> {
    let grid = &problem.grid;
    let p = problem.p;
    let h = |s: f64| {
        let w: Vec<f64> = d.iter().zip(phi).map(|(a, b)| s * a + b).collect();
        lp_power(grid, &w, p) - 1.0
    };
    let h0 = h(0.0);
    let dn = lp_power(grid, d, p).powf(1.0 / p);
    if dn == 0.0 {
        return None;
    }
    let mut best: Option<f64> = None;
    for sign in [1.0, -1.0] {
        let mut prev = (0.0, h0);
        let mut s = 1e-3 / dn;
        while s < 1e3 / dn {
            let hs = h(sign * s);
            if hs.signum() != prev.1.signum() {
                let (mut lo, mut hi) = (prev.0, sign * s);
                let flo = prev.1;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if h(mid).signum() == flo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let root = 0.5 * (lo + hi);
                if best.is_none_or(|b: f64| root.abs() < b.abs()) {
                    best = Some(root);
                }
                break;
            }
            prev = (sign * s, hs);
            s *= 1.25;
        }
    }
    best
}

pub fn starts(problem: &ReducedProblem, phi: &[f64]) -> Vec<(String, Vec<f64>)> {
    let nf = problem.free_dim();
    let mut out = vec![("zero".to_string(), vec![0.0; nf])];
    let (dim, r) = (problem.grid.dim(), problem.r);
    for eps in [0.2, 0.5] {
        let spec = BubbleSpec { epsilon: eps, cutoff: Cutoff::Smooth { radius: 1.0 } };
        let d: Vec<f64> = problem.grid.nodes().iter().map(|&t| bubble_eval(&spec, dim, r, t)).collect();
        let d = problem.space.enforce_values(&d);
        if let Some(s) = feasible_scale(problem, &d, phi) {
            let u: Vec<f64> = d.iter().map(|v| s * v).collect();
            out.push((format!("bubble_{eps}"), problem.free_part(&u)));
        }
    }
    let dphi = problem.space.enforce_values(phi);
    if dphi.iter().any(|v| *v != 0.0) {
        if let Some(s) = feasible_scale(problem, &dphi, phi) {
            let u: Vec<f64> = dphi.iter().map(|v| s * v).collect();
            out.push(("phi_rescale".to_string(), problem.free_part(&u)));
        }
    }
    out
}

fn run_start(problem: &ReducedProblem, phi: &[f64], label: String, c0: Vec<f64>, tol: &Tolerances) -> Candidate {
    let mut c = c0;
    let mut iterations = 0;
    let mut last = None;
    for (ctol, itol, outer) in [(1e-6, 1e-6, tol.max_outer), (tol.constraint * 1e-2, 1e-9, 10)] {
        let al = augmented::run(problem, phi, &c, ctol, itol, outer, tol.max_inner);
        iterations += al.inner_iterations;
        let k = kkt::polish(problem, phi, &al.c, al.lambda, 30, 1e-13);
        iterations += k.iterations;
        let done = k.stationarity < tol.gradient && k.constraint.abs() < tol.constraint * 1e-2;
        c = k.c.clone();
        last = Some(k);
        if done {
            break;
        }
    }
    let k = last.expect("at least one stage runs");
    let constraint_residual = ((1.0 + k.constraint).max(0.0).powf(1.0 / problem.p) - 1.0).abs();
    Candidate {
        label,
        c: k.c,
        lambda_g: k.lambda,
        constraint_residual,
        stationarity: k.stationarity,
        iterations,
    }
}

fn l2_sq(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| b * a * a).sum()
}

/// Solves the discrete problem for `spec` with multi-start; see [`SolveResult`].
pub fn solve(spec: &ProblemSpec) -> Result<SolveResult> {
    let grid = spec.phi.grid().clone();
    let problem = ReducedProblem::new(Arc::clone(&grid), spec.r, spec.bc)?;
    solve_with(spec, &problem)
}

/// As [`solve`], reusing precomputed operators.
pub fn solve_with(spec: &ProblemSpec, problem: &ReducedProblem) -> Result<SolveResult> {
    if problem.r != spec.r || problem.bc != spec.bc || *problem.grid != **spec.phi.grid() {
        return Err(Error::InvalidArgument("operators do not match the problem".into()));
    }
    let phi = spec.phi.values();
    let pnorm = spec.phi_norm();
    if (pnorm - 1.0).abs() < NORM_ONE_TOL {
        let zero = Profile::zeros(spec.phi.grid().clone());
        return Ok(SolveResult {
            value: 0.0,
            minimizer: zero,
            multiplier: f64::NAN,
            multiplier_identity: None,
            constraint_residual: (pnorm - 1.0).abs(),
            el_residual: 0.0,
            natural_bc_residuals: Vec::new(),
            iterations: 0,
            converged: true,
            degenerate: true,
            starts: Vec::new(),
        });
    }
    let p = problem.p;
    let tol = spec.tol;
    let mut candidates: Vec<(Candidate, f64, f64, bool)> = Vec::new();
    for (label, c0) in starts(problem, phi) {
        let cand = run_start(problem, phi, label, c0, &tol);
        let u = problem.embed(&cand.c);
        let value = problem.energy(&u);
        let ok = cand.constraint_residual < tol.constraint && cand.stationarity < tol.gradient;
        let l2 = l2_sq(&u, grid_weights(problem));
        candidates.push((cand, value, l2, ok));
    }
    let pick = best_index(&candidates);
    let summaries = candidates
        .iter()
        .map(|(c, v, _, ok)| StartSummary {
            label: c.label.clone(),
            value: *v,
            multiplier: p * c.lambda_g / 2.0,
            constraint_residual: c.constraint_residual,
            converged: *ok,
        })
        .collect();
    let (cand, value, _, ok) = &candidates[pick];
    let u = problem.embed(&cand.c);
    let minimizer = Profile::new(spec.phi.grid().clone(), u)?;
    let multiplier = p * cand.lambda_g / 2.0;
    let multiplier_identity = lagrange_multiplier_identity(&minimizer, &spec.phi, *value, spec).ok();
    let el = el_residual(&minimizer, &spec.phi, multiplier, spec)?;
    let converged = *ok && el.interior < tol.el;
    Ok(SolveResult {
        value: *value,
        minimizer,
        multiplier,
        multiplier_identity,
        constraint_residual: cand.constraint_residual,
        el_residual: el.interior,
        natural_bc_residuals: el.natural_bc,
        iterations: cand.iterations,
        converged,
        degenerate: false,
        starts: summaries,
    })
}

fn grid_weights(problem: &ReducedProblem) -> &[f64] {
    problem.grid.weights()
}

/// Lowest value among converged candidates (all candidates if none converged);
/// values within `1e-8` relative prefer the smaller `L^2` norm.
fn best_index(c: &[(Candidate, f64, f64, bool)]) -> usize {
    let any_ok = c.iter().any(|x| x.3);
    let mut best: Option<usize> = None;
    for (i, x) in c.iter().enumerate() {
        if any_ok && !x.3 {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let (vb, vi) = (c[b].1, x.1);
                if vi < vb * (1.0 - 1e-8) || ((vi - vb).abs() <= 1e-8 * vb.abs() && x.2 < c[b].2) {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.unwrap_or(0)
}
