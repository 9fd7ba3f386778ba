//! Finite-difference weights and the discrete radial Laplacian.

use crate::sparse::CsrMatrix;
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Interior accuracy of the radial Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StencilOrder {
    #[default]
    Second,
    Fourth,
}

impl StencilOrder {
    pub fn half_width(self) -> usize {
        match self {
            StencilOrder::Second => 1,
            StencilOrder::Fourth => 2,
        }
    }
}

/// `a / b` refined by one residual step; restores full precision for
/// extended-precision types whose native quotient is only `f64`-accurate.
pub fn div<T: Float>(a: T, b: T) -> T {
    let q = a / b;
    q + (a - q * b) / b
}

/// Fornberg's algorithm: `w[k][d]` is the weight of `x[k]` in the `d`-th
/// derivative at `z`, for `d = 0..=m`.
pub fn fornberg<T: Float>(z: T, x: &[T], m: usize) -> Vec<Vec<T>> {
    let n = x.len();
    let mut c = vec![vec![T::zero(); m + 1]; n];
    let mut c1 = T::one();
    let mut c4 = x[0] - z;
    c[0][0] = T::one();
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 = c2 * c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    let kf = T::from(k).unwrap();
                    c[i][k] = div(c1 * (kf * c[i - 1][k - 1] - c5 * c[i - 1][k]), c2);
                }
                c[i][0] = div(-c1 * c5 * c[i - 1][0], c2);
            }
            for k in (1..=mn).rev() {
                let kf = T::from(k).unwrap();
                c[j][k] = div(c4 * c[j][k] - kf * c[j][k - 1], c3);
            }
            c[j][0] = div(c4 * c[j][0], c3);
        }
        c1 = c2;
    }
    c
}

/// Stencil positions for node `i`: the ghost rule maps index `-k-1` to `-rho_k`.
fn window<T: Float>(nodes: &[T], i: usize, order: StencilOrder) -> Vec<(T, usize)> {
    let n = nodes.len();
    let h = order.half_width();
    let (lo, hi): (isize, isize) = if i + h > n - 1 {
        let width = 2 * h + 2;
        ((n - width) as isize, n as isize - 1)
    } else {
        (i as isize - h as isize, (i + h) as isize)
    };
    (lo..=hi)
        .map(|k| {
            if k < 0 {
                let m = (-k - 1) as usize;
                (-nodes[m], m)
            } else {
                (nodes[k as usize], k as usize)
            }
        })
        .collect()
}

/// Sparse matrix of `u'' + (N-1) u' / rho` on the given nodes.
pub fn laplacian_matrix<T: Float>(nodes: &[T], dim: usize, order: StencilOrder) -> CsrMatrix<T> {
    let nm1 = T::from(dim as f64 - 1.0).unwrap();
    let rows = (0..nodes.len())
        .map(|i| {
            let win = window(nodes, i, order);
            let xs: Vec<T> = win.iter().map(|p| p.0).collect();
            let w = fornberg(nodes[i], &xs, 2);
            win.iter()
                .zip(&w)
                .map(|(p, wk)| (p.1, wk[2] + div(nm1 * wk[1], nodes[i])))
                .collect()
        })
        .collect();
    CsrMatrix::from_rows(nodes.len(), rows)
}

/// One-sided weights for the `q`-th derivative at the last node, on the last
/// `q + extra` nodes.
pub fn boundary_derivative_row<T: Float>(nodes: &[T], q: usize, extra: usize) -> Vec<(usize, T)> {
    let n = nodes.len();
    let start = n - (q + extra);
    let w = fornberg(nodes[n - 1], &nodes[start..], q);
    (start..n).zip(w).map(|(k, wk)| (k, wk[q])).collect()
}
