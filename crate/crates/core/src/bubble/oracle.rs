//! Finite-difference oracle for the closed-form iterated Laplacians.

use super::coeffs::{coeff_g_printed, CoeffTable};
use super::{polyharmonic_with, pure_bubble};
use crate::error::{Error, Result};
use crate::grid::{GridKind, RadialGrid};
use crate::laplacian::iterated_negative_laplacian;
use crate::stencil::StencilOrder;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub j: usize,
    /// Largest pointwise relative error of the derived closed form.
    pub max_rel_err_derived: f64,
    /// The same for the printed coefficients and prefactor.
    pub max_rel_err_printed: f64,
    pub worst_t_printed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCheck {
    pub dim: usize,
    pub r: usize,
    pub epsilon: f64,
    pub n_nodes: usize,
    pub window: (f64, f64),
    pub table: CoeffTable,
    pub orders: Vec<OrderCheck>,
}

impl ClosedFormCheck {
    pub fn derived_passes(&self, tol: f64) -> bool {
        self.orders.iter().all(|o| o.max_rel_err_derived < tol)
    }

    pub fn printed_passes(&self, tol: f64) -> bool {
        self.orders.iter().all(|o| o.max_rel_err_printed < tol)
    }
}

/// Compares both closed forms with a fourth-order finite-difference iterated
/// Laplacian evaluated in double-double arithmetic, for `j = 1..=r`.
pub fn verify_closed_form(dim: usize, r: usize, epsilon: f64, n_nodes: usize, window: (f64, f64)) -> Result<ClosedFormCheck> {
    if dim <= 2 * r {
        return Err(Error::SubcriticalDimension { n: dim, two_r: 2 * r });
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let grid = RadialGrid::new(dim, n_nodes, GridKind::Uniform)?;
    let nodes: Vec<TwoFloat> = grid.nodes().iter().map(|&x| TwoFloat::from(x)).collect();
    let eps = TwoFloat::from(epsilon);
    let values: Vec<TwoFloat> = nodes.iter().map(|&t| pure_bubble(eps, dim, r, t)).collect();
    let table = CoeffTable::new(dim, r);
    let inside: Vec<usize> = (0..grid.len())
        .filter(|&k| grid.nodes()[k] >= window.0 && grid.nodes()[k] <= window.1)
        .collect();
    let mut orders = Vec::with_capacity(r);
    let mut current = values;
    let lap_step = |v: &[TwoFloat]| iterated_negative_laplacian(&nodes, v, dim, 1, StencilOrder::Fourth);
    for j in 1..=r {
        current = lap_step(&current);
        let printed: Vec<i128> = (0..=j).map(|i| coeff_g_printed(i, j, dim, r)).collect();
        let (mut ed, mut ep, mut worst) = (0.0f64, 0.0f64, 0.0);
        for &k in &inside {
            let t = grid.nodes()[k];
            let fd = current[k].to_f64().unwrap();
            let d = polyharmonic_with(&table.derived[j], epsilon, dim, r, j, t, true);
            let p = polyharmonic_with(&printed, epsilon, dim, r, j, t, false);
            ed = ed.max(((d - fd) / fd).abs());
            let e = ((p - fd) / fd).abs();
            if e > ep {
                ep = e;
                worst = t;
            }
        }
        orders.push(OrderCheck { j, max_rel_err_derived: ed, max_rel_err_printed: ep, worst_t_printed: worst });
    }
    Ok(ClosedFormCheck { dim, r, epsilon, n_nodes, window, table, orders })
}
