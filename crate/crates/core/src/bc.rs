//! Boundary-condition families and the discrete essential-BC subspaces.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::profile::Profile;
use crate::sparse::CsrMatrix;
use crate::stencil::{boundary_derivative_row, laplacian_matrix, StencilOrder};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// `u = u' = ... = u^{(r-1)} = 0` at the boundary.
    Dirichlet,
    /// `u = Δu = ... = Δ^{m-1} u = 0` at the boundary, `m = ceil(r/2)`.
    Navier,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Navier => "navier",
        }
    }
}

/// Number of essential Navier conditions.
pub fn navier_essential_count(r: usize) -> usize {
    r.div_ceil(2)
}

/// Row `k` of `L^k` at the boundary node, `k = 0..count`.
pub fn laplacian_power_rows(lap: &CsrMatrix<f64>, count: usize) -> Vec<Vec<(usize, f64)>> {
    let n = lap.rows();
    let mut e = vec![0.0; n];
    e[n - 1] = 1.0;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(e.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i, *v)).collect());
        e = lap.tr_mul_vec(&e);
    }
    out
}

/// Constraint rows `C u = 0` defining the essential BCs at `rho = 1`.
pub fn constraint_rows(grid: &RadialGrid, lap: &CsrMatrix<f64>, r: usize, bc: BoundaryCondition) -> Vec<Vec<(usize, f64)>> {
    let n = grid.len();
    match bc {
        BoundaryCondition::Dirichlet => {
            let mut rows = vec![vec![(n - 1, 1.0)]];
            for q in 1..r {
                rows.push(boundary_derivative_row(grid.nodes(), q, 2));
            }
            rows
        }
        BoundaryCondition::Navier => laplacian_power_rows(lap, navier_essential_count(r)),
    }
}

/// Essential-BC subspace parametrized by the free (leading) nodal values.
///
/// `u = B c` with `B = [I; T]`; the last `k` nodes are solved from the constraints.
#[derive(Debug, Clone)]
pub struct DiscreteSpace {
    grid: Arc<RadialGrid>,
    r: usize,
    bc: BoundaryCondition,
    rows: Vec<Vec<(usize, f64)>>,
    tail: DMatrix<f64>,
}

impl DiscreteSpace {
    pub fn new(grid: Arc<RadialGrid>, r: usize, bc: BoundaryCondition) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("order r must be positive".into()));
        }
        let lap = laplacian_matrix(grid.nodes(), grid.dim(), StencilOrder::Second);
        Self::with_laplacian(grid, &lap, r, bc)
    }

    pub fn with_laplacian(grid: Arc<RadialGrid>, lap: &CsrMatrix<f64>, r: usize, bc: BoundaryCondition) -> Result<Self> {
        let n = grid.len();
        let rows = constraint_rows(&grid, lap, r, bc);
        let k = rows.len();
        if k >= n {
            return Err(Error::InvalidGrid("too few nodes for the boundary conditions".into()));
        }
        let nf = n - k;
        let mut c_free = DMatrix::zeros(k, nf);
        let mut c_tail = DMatrix::zeros(k, k);
        for (i, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                if c < nf {
                    c_free[(i, c)] += v;
                } else {
                    c_tail[(i, c - nf)] += v;
                }
            }
        }
        let lu = c_tail.lu();
        let tail = lu
            .solve(&(-c_free))
            .ok_or_else(|| Error::LinearAlgebra("singular boundary block".into()))?;
        Ok(DiscreteSpace { grid, r, bc, rows, tail })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }

    pub fn free_dim(&self) -> usize {
        self.grid.len() - self.rows.len()
    }

    /// Smallest node index touched by any constraint row.
    pub fn first_constrained_node(&self) -> usize {
        self.rows.iter().flat_map(|r| r.iter().map(|e| e.0)).min().unwrap_or(self.grid.len())
    }

    /// `B c`.
    pub fn embed(&self, c: &[f64]) -> Vec<f64> {
        let nf = self.free_dim();
        assert_eq!(c.len(), nf);
        let t = &self.tail * DVector::from_column_slice(c);
        let mut u = c.to_vec();
        u.extend(t.iter());
        u
    }

    /// `B^T g`.
    pub fn restrict(&self, g: &[f64]) -> Vec<f64> {
        let nf = self.free_dim();
        let gt = DVector::from_column_slice(&g[nf..]);
        let add = self.tail.tr_mul(&gt);
        g[..nf].iter().zip(add.iter()).map(|(a, b)| a + b).collect()
    }

    /// Dense `B` (n × free_dim).
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let nf = self.free_dim();
        let n = self.grid.len();
        let mut b = DMatrix::zeros(n, nf);
        for i in 0..nf {
            b[(i, i)] = 1.0;
        }
        b.view_mut((nf, 0), (n - nf, nf)).copy_from(&self.tail);
        b
    }

    /// Keeps the free values and recomputes the constrained tail.
    pub fn enforce_values(&self, u: &[f64]) -> Vec<f64> {
        self.embed(&u[..self.free_dim()])
    }

    /// Largest constraint residual, relative to the row's scale on `u`.
    pub fn residual(&self, u: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                let (mut s, mut scale) = (0.0, 0.0);
                for &(c, v) in row {
                    s += v * u[c];
                    scale += (v * u[c]).abs();
                }
                if scale == 0.0 {
                    0.0
                } else {
                    s.abs() / scale.max(f64::MIN_POSITIVE)
                }
            })
            .fold(0.0, f64::max)
    }

    /// Absolute constraint values `C u`.
    pub fn constraint_values(&self, u: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().map(|&(c, v)| v * u[c]).sum()).collect()
    }
}

/// Projection of `u` onto the discrete essential-BC subspace.
pub fn enforce_bc(u: &Profile, r: usize, bc: BoundaryCondition) -> Result<Profile> {
    let space = DiscreteSpace::new(u.grid().clone(), r, bc)?;
    u.with_values(space.enforce_values(u.values()))
}
