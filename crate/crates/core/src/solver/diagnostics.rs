//! Multiplier identity and Euler–Lagrange residuals.

use super::ProblemSpec;
use crate::bc::{navier_essential_count, BoundaryCondition, DiscreteSpace};
use crate::error::{Error, Result};
use crate::norms::{lp_power_grad, Seminorm};
use crate::profile::Profile;
use crate::stencil::{laplacian_matrix, StencilOrder};
use serde::{Deserialize, Serialize};

/// `∫ |u+φ|^{p−2}(u+φ) φ` with the interpolant quadrature.
pub fn constraint_pairing(u: &Profile, phi: &Profile, p: f64) -> f64 {
    let g = u.grid();
    g.linear_quadrature()
        .iter()
        .map(|q| {
            let w = q.a * (u.values()[q.i] + phi.values()[q.i]) + q.b * (u.values()[q.j] + phi.values()[q.j]);
            let f = q.a * phi.values()[q.i] + q.b * phi.values()[q.j];
            q.weight * w.abs().powf(p - 2.0) * w * f
        })
        .sum()
}

/// `Λ = value / (1 − ∫ |u+φ|^{p−2}(u+φ) φ)`.
pub fn lagrange_multiplier_identity(u: &Profile, phi: &Profile, value: f64, spec: &ProblemSpec) -> Result<f64> {
    if !u.same_grid(phi) {
        return Err(Error::GridMismatch);
    }
    let bracket = 1.0 - constraint_pairing(u, phi, spec.exponent());
    if bracket.abs() < 1e-12 {
        return Err(Error::DegenerateMultiplier { bracket });
    }
    Ok(value / bracket)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElResidual {
    /// Normalized interior residual of `(−Δ)^r u = Λ|u+φ|^{p−2}(u+φ)`.
    pub interior: f64,
    /// `|Δ^k u(1)| / max|Δ^k u|` for the natural Navier conditions `k = m..r−1`.
    pub natural_bc: Vec<f64>,
}

impl ElResidual {
    pub fn max_natural(&self) -> f64 {
        self.natural_bc.iter().fold(0.0, |a, &b| a.max(b))
    }
}

/// Strong-form residual on nodes not touched by constraint rows.
///
/// `(−Δ)^r u` is discretized as `W^{-1} M^T W_M M u` and the nonlinearity as
/// `∇G / (p W)`, so the residual vanishes at discrete stationary points.
pub fn el_residual(u: &Profile, phi: &Profile, lambda: f64, spec: &ProblemSpec) -> Result<ElResidual> {
    if !u.same_grid(phi) {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid();
    let lap = laplacian_matrix(grid.nodes(), grid.dim(), StencilOrder::Second);
    let space = DiscreteSpace::with_laplacian(grid.clone(), &lap, spec.r, spec.bc)?;
    let semi = Seminorm::new(grid, &lap, spec.r);
    let p = spec.exponent();
    let vals = u.values();
    let w: Vec<f64> = vals.iter().zip(phi.values()).map(|(a, b)| a + b).collect();
    let au = semi.normal_apply(vals);
    let dg = lp_power_grad(grid, &w, p);
    let nodal = grid.weights();
    let interior = space.first_constrained_node();
    let (mut res, mut fnorm) = (0.0, 0.0);
    for k in 0..interior {
        let f = dg[k] / (p * nodal[k]);
        let d = au[k] / nodal[k] - lambda * f;
        res += nodal[k] * d * d;
        fnorm += nodal[k] * f * f;
    }
    let scale = lambda.abs() * fnorm.sqrt() + semi.energy(vals).sqrt();
    let interior_res = if res == 0.0 { 0.0 } else { res.sqrt() / scale };
    let mut natural = Vec::new();
    if spec.bc == BoundaryCondition::Navier {
        let m = navier_essential_count(spec.r);
        let mut v = vals.to_vec();
        for k in 0..spec.r {
            if k >= m {
                let top = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                let last = v[v.len() - 1].abs();
                natural.push(if top == 0.0 { 0.0 } else { last / top });
            }
            v = lap.mul_vec(&v);
        }
    }
    Ok(ElResidual { interior: interior_res, natural_bc: natural })
}
