//! The constrained problem in free coordinates of the essential-BC subspace.

use crate::bc::{BoundaryCondition, DiscreteSpace};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::norms::{critical_exponent, lp_power, lp_power_grad, lp_power_hessian, Seminorm};
use crate::sparse::CsrMatrix;
use crate::stencil::{laplacian_matrix, StencilOrder};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Discrete operators for one `(grid, r, bc)` triple.
///
/// Free coordinates `c` map to nodal values by `u = B c`; the energy is
/// `|R c|^2` with `R` the triangular factor of `W^{1/2} M B`.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    pub grid: Arc<RadialGrid>,
    pub r: usize,
    pub bc: BoundaryCondition,
    pub p: f64,
    pub lap: CsrMatrix<f64>,
    pub space: DiscreteSpace,
    pub seminorm: Seminorm,
    pub basis: DMatrix<f64>,
    /// Upper-triangular `R` with `B^T A B = R^T R`.
    pub factor: DMatrix<f64>,
}

impl ReducedProblem {
    pub fn new(grid: Arc<RadialGrid>, r: usize, bc: BoundaryCondition) -> Result<Self> {
        let p = critical_exponent(grid.dim(), r)?;
        let lap = laplacian_matrix(grid.nodes(), grid.dim(), StencilOrder::Second);
        let space = DiscreteSpace::with_laplacian(grid.clone(), &lap, r, bc)?;
        let seminorm = Seminorm::new(&grid, &lap, r);
        let basis = space.basis_matrix();
        let rows = seminorm.op.rows();
        let mut wm = DMatrix::zeros(rows, grid.len());
        for k in 0..rows {
            let s = seminorm.weights[k].sqrt();
            for (c, v) in seminorm.op.row(k) {
                wm[(k, c)] = s * v;
            }
        }
        let wmb = wm * &basis;
        let mut factor = wmb.qr().r();
        // Orient the diagonal positively so the factor is unique.
        for i in 0..factor.nrows() {
            if factor[(i, i)] < 0.0 {
                for j in i..factor.ncols() {
                    factor[(i, j)] = -factor[(i, j)];
                }
            }
            if factor[(i, i)] == 0.0 {
                return Err(Error::LinearAlgebra("energy is singular on the subspace".into()));
            }
        }
        Ok(ReducedProblem { grid, r, bc, p, lap, space, seminorm, basis, factor })
    }

    pub fn free_dim(&self) -> usize {
        self.space.free_dim()
    }

    pub fn embed(&self, c: &[f64]) -> Vec<f64> {
        self.space.embed(c)
    }

    pub fn free_part(&self, u: &[f64]) -> Vec<f64> {
        u[..self.free_dim()].to_vec()
    }

    /// `y = R c`.
    pub fn to_y(&self, c: &[f64]) -> Vec<f64> {
        (&self.factor * DVector::from_column_slice(c)).as_slice().to_vec()
    }

    /// `c = R^{-1} y`.
    pub fn from_y(&self, y: &[f64]) -> Vec<f64> {
        self.factor
            .solve_upper_triangular(&DVector::from_column_slice(y))
            .expect("factor has a nonzero diagonal")
            .as_slice()
            .to_vec()
    }

    /// `R^{-T} g`: maps a `c`-gradient to a `y`-gradient.
    pub fn grad_to_y(&self, g: &[f64]) -> Vec<f64> {
        self.factor
            .tr_solve_upper_triangular(&DVector::from_column_slice(g))
            .expect("factor has a nonzero diagonal")
            .as_slice()
            .to_vec()
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        self.seminorm.energy(u)
    }

    /// `B^T A B c` evaluated through the sparse operator.
    pub fn energy_half_grad_c(&self, c: &[f64]) -> Vec<f64> {
        let u = self.embed(c);
        self.space.restrict(&self.seminorm.normal_apply(&u))
    }

    /// `G(u) = ∫ |u + φ|^p`.
    pub fn g_total(&self, u: &[f64], phi: &[f64]) -> f64 {
        let w: Vec<f64> = u.iter().zip(phi).map(|(a, b)| a + b).collect();
        lp_power(&self.grid, &w, self.p)
    }

    /// `B^T ∇G`.
    pub fn g_grad_c(&self, u: &[f64], phi: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = u.iter().zip(phi).map(|(a, b)| a + b).collect();
        self.space.restrict(&lp_power_grad(&self.grid, &w, self.p))
    }

    /// Dense `B^T ∇²G B`.
    pub fn g_hess_c(&self, u: &[f64], phi: &[f64]) -> DMatrix<f64> {
        let w: Vec<f64> = u.iter().zip(phi).map(|(a, b)| a + b).collect();
        let (d, s) = lp_power_hessian(&self.grid, &w, self.p);
        let n = w.len();
        let nf = self.free_dim();
        let b = &self.basis;
        let mut hb = DMatrix::zeros(n, nf);
        for i in 0..n {
            for j in 0..nf {
                let mut v = d[i] * b[(i, j)];
                if i > 0 {
                    v += s[i - 1] * b[(i - 1, j)];
                }
                if i + 1 < n {
                    v += s[i] * b[(i + 1, j)];
                }
                hb[(i, j)] = v;
            }
        }
        b.tr_mul(&hb)
    }

    /// Dense `B^T A B = R^T R`.
    pub fn energy_matrix(&self) -> DMatrix<f64> {
        self.factor.tr_mul(&self.factor)
    }
}
