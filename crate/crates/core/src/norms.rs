//! `L^p` functionals and the `‖·‖_r` seminorm.

use crate::bc::{BoundaryCondition, DiscreteSpace};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::profile::Profile;
use crate::sparse::CsrMatrix;
use crate::stencil::{laplacian_matrix, StencilOrder};
use nalgebra::DMatrix;
use std::sync::Arc;

/// Default tolerance for essential-BC checks.
pub const BC_TOL: f64 = 1e-8;

/// Critical exponent `2N / (N - 2r)`.
pub fn critical_exponent(dim: usize, r: usize) -> Result<f64> {
    if dim <= 2 * r {
        return Err(Error::SubcriticalDimension { n: dim, two_r: 2 * r });
    }
    Ok(2.0 * dim as f64 / (dim as f64 - 2.0 * r as f64))
}

/// `∫ |I u|^p dx` for the piecewise-linear interpolant `I u`.
pub fn lp_power(grid: &RadialGrid, u: &[f64], p: f64) -> f64 {
    grid.linear_quadrature()
        .iter()
        .map(|q| q.weight * (q.a * u[q.i] + q.b * u[q.j]).abs().powf(p))
        .sum()
}

/// Gradient of [`lp_power`] with respect to the nodal values.
pub fn lp_power_grad(grid: &RadialGrid, u: &[f64], p: f64) -> Vec<f64> {
    let mut g = vec![0.0; u.len()];
    for q in grid.linear_quadrature() {
        let w = q.a * u[q.i] + q.b * u[q.j];
        let f = q.weight * p * w.abs().powf(p - 2.0) * w;
        g[q.i] += q.a * f;
        g[q.j] += q.b * f;
    }
    g
}

/// Tridiagonal Hessian of [`lp_power`]: `(diag, sub)` with `sub[k]` coupling nodes `k, k+1`.
pub fn lp_power_hessian(grid: &RadialGrid, u: &[f64], p: f64) -> (Vec<f64>, Vec<f64>) {
    let n = u.len();
    let mut d = vec![0.0; n];
    let mut s = vec![0.0; n - 1];
    for q in grid.linear_quadrature() {
        let w = q.a * u[q.i] + q.b * u[q.j];
        let f = q.weight * p * (p - 1.0) * w.abs().powf(p - 2.0);
        d[q.i] += q.a * q.a * f;
        if q.j != q.i {
            d[q.j] += q.b * q.b * f;
            s[q.i] += q.a * q.b * f;
        }
    }
    (d, s)
}

/// `∫ I f · I g dx` with the same quadrature.
pub fn pairing(grid: &RadialGrid, f: &[f64], g: &[f64]) -> f64 {
    grid.linear_quadrature()
        .iter()
        .map(|q| q.weight * (q.a * f[q.i] + q.b * f[q.j]) * (q.a * g[q.i] + q.b * g[q.j]))
        .sum()
}

/// `(∫ |u|^p dx)^{1/p}`.
pub fn lp_norm(u: &Profile, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p must be at least 1, got {p}")));
    }
    Ok(lp_power(u.grid(), u.values(), p).powf(1.0 / p))
}

/// Discrete `‖·‖_r`: `‖u‖_r^2 = Σ_k w_k (M u)_k^2`.
///
/// Even `r`: `M = (-L)^{r/2}` with node weights. Odd `r`: `M` is the staggered
/// difference of `(-L)^{(r-1)/2}` with exact shell weights.
#[derive(Debug, Clone)]
pub struct Seminorm {
    pub r: usize,
    pub op: CsrMatrix<f64>,
    pub weights: Vec<f64>,
}

impl Seminorm {
    pub fn new(grid: &RadialGrid, lap: &CsrMatrix<f64>, r: usize) -> Self {
        let n = grid.len();
        let neg = lap.scale(-1.0);
        let mut pow = CsrMatrix::identity(n);
        for _ in 0..r / 2 {
            pow = neg.matmul(&pow);
        }
        if r.is_multiple_of(2) {
            Seminorm { r, op: pow, weights: grid.weights().to_vec() }
        } else {
            let x = grid.nodes();
            let diff = CsrMatrix::from_rows(
                n,
                (0..n - 1)
                    .map(|k| {
                        let d = 1.0 / (x[k + 1] - x[k]);
                        vec![(k, -d), (k + 1, d)]
                    })
                    .collect(),
            );
            Seminorm { r, op: diff.matmul(&pow), weights: grid.cell_weights().to_vec() }
        }
    }

    pub fn from_grid(grid: &RadialGrid, r: usize) -> Self {
        let lap = laplacian_matrix(grid.nodes(), grid.dim(), StencilOrder::Second);
        Self::new(grid, &lap, r)
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.op.mul_vec(u)
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        self.apply(u).iter().zip(&self.weights).map(|(m, w)| w * m * m).sum()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let (mu, mv) = (self.apply(u), self.apply(v));
        mu.iter().zip(&mv).zip(&self.weights).map(|((a, b), w)| w * a * b).sum()
    }

    /// `M^T W M u`; the energy gradient is twice this.
    pub fn normal_apply(&self, u: &[f64]) -> Vec<f64> {
        let mu: Vec<f64> = self.apply(u).iter().zip(&self.weights).map(|(m, w)| w * m).collect();
        self.op.tr_mul_vec(&mu)
    }

    /// Dense `M^T W M`.
    pub fn normal_matrix(&self) -> DMatrix<f64> {
        let n = self.op.cols();
        let mut a = DMatrix::zeros(n, n);
        for k in 0..self.op.rows() {
            let w = self.weights[k];
            let row: Vec<(usize, f64)> = self.op.row(k).collect();
            for &(i, vi) in &row {
                for &(j, vj) in &row {
                    a[(i, j)] += w * vi * vj;
                }
            }
        }
        a
    }
}

/// `‖u‖_r^2`, rejecting profiles that violate the essential BCs of `bc`.
pub fn hr_seminorm_sq(u: &Profile, r: usize, bc: BoundaryCondition) -> Result<f64> {
    let grid = u.grid();
    let lap = laplacian_matrix(grid.nodes(), grid.dim(), StencilOrder::Second);
    let space = DiscreteSpace::with_laplacian(Arc::clone(grid), &lap, r, bc)?;
    let residual = space.residual(u.values());
    if residual > BC_TOL {
        return Err(Error::BoundaryViolation { residual, tol: BC_TOL });
    }
    Ok(Seminorm::new(grid, &lap, r).energy(u.values()))
}
