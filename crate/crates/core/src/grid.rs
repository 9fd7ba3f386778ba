//! Radial grids on the unit ball and their quadrature rules.

use crate::error::{Error, Result};
use crate::quad::gauss_legendre_unit;
use serde::{Deserialize, Serialize};

/// Node placement on (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum GridKind {
    #[default]
    Uniform,
    /// `rho = sinh(beta xi) / sinh(beta)` on a uniform `xi` grid; clusters nodes near the origin.
    Graded { beta: f64 },
}

/// One point of the piecewise-linear quadrature: the interpolant there is
/// `a * u[i] + b * u[j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub i: usize,
    pub j: usize,
    pub a: f64,
    pub b: f64,
    pub weight: f64,
}

/// Radial grid with nodes `rho_k = map((k - 1/2) / (n - 1/2))`, `k = 1..n`.
///
/// The origin is excluded; profiles are extended evenly through it.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    kind: GridKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cell_weights: Vec<f64>,
    linear_quad: Vec<QuadPoint>,
    surface: f64,
}

/// Surface area of the unit sphere in `R^{k+1}`.
pub fn sphere_area(k: usize) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let (mut a, mut b) = (2.0, two_pi);
    if k == 0 {
        return a;
    }
    for m in 2..=k {
        let next = two_pi / (m as f64 - 1.0) * a;
        a = b;
        b = next;
    }
    b
}

/// Volume of the unit ball in `R^N`.
pub fn ball_volume(dim: usize) -> f64 {
    sphere_area(dim - 1) / dim as f64
}

pub fn make_radial_grid(dim: usize, n_nodes: usize, kind: GridKind) -> Result<RadialGrid> {
    RadialGrid::new(dim, n_nodes, kind)
}

impl RadialGrid {
    pub fn new(dim: usize, n_nodes: usize, kind: GridKind) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if n_nodes < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 nodes, got {n_nodes}")));
        }
        if let GridKind::Graded { beta } = kind {
            if !(beta.is_finite() && beta > 0.0) {
                return Err(Error::InvalidGrid(format!("grading beta must be positive, got {beta}")));
            }
        }
        let h = 1.0 / (n_nodes as f64 - 0.5);
        let nodes: Vec<f64> = (0..n_nodes)
            .map(|k| {
                let xi = if k + 1 == n_nodes { 1.0 } else { (k as f64 + 0.5) * h };
                match kind {
                    GridKind::Uniform => xi,
                    GridKind::Graded { beta } => {
                        if k + 1 == n_nodes {
                            1.0
                        } else {
                            (beta * xi).sinh() / beta.sinh()
                        }
                    }
                }
            })
            .collect();
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("nodes not strictly increasing".into()));
        }
        let surface = sphere_area(dim - 1);
        let weights = node_weights(&nodes, dim, surface);
        if let Some(k) = weights.iter().position(|w| !(*w > 0.0)) {
            return Err(Error::InvalidGrid(format!("non-positive quadrature weight at node {k}")));
        }
        let nf = dim as f64;
        let cell_weights = nodes
            .windows(2)
            .map(|w| surface * (w[1].powf(nf) - w[0].powf(nf)) / nf)
            .collect();
        let linear_quad = linear_quadrature(&nodes, dim, surface);
        Ok(RadialGrid { dim, kind, nodes, weights, cell_weights, linear_quad, surface })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Node weights: `sum_k w_k f(rho_k)` approximates `∫_B f dx`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Exact measure of the shells between consecutive nodes.
    pub fn cell_weights(&self) -> &[f64] {
        &self.cell_weights
    }

    /// Quadrature for functionals of the piecewise-linear interpolant.
    pub fn linear_quadrature(&self) -> &[QuadPoint] {
        &self.linear_quad
    }

    pub fn surface_area(&self) -> f64 {
        self.surface
    }

    /// Smallest gap between neighbouring nodes (the origin gap counts as `2 rho_1`).
    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(2.0 * self.nodes[0], f64::min)
    }

    /// `∫_B f dx` by node weights.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }
}

fn gauss_points(dim: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_legendre_unit((dim + 3) / 2 + 6)
}

/// Exact integrals of piecewise-linear hats in `s = rho^2` against `rho^{N-1}`;
/// on the origin cell the linear function through the first two nodes is used.
fn node_weights(nodes: &[f64], dim: usize, surface: f64) -> Vec<f64> {
    let n = nodes.len();
    let nf = dim as f64;
    let mut w = vec![0.0; n];
    let (r0, r1) = (nodes[0], nodes[1]);
    let m0 = r0.powf(nf) / nf;
    let m2 = r0.powf(nf + 2.0) / (nf + 2.0);
    let den = r1 * r1 - r0 * r0;
    w[0] += (r1 * r1 * m0 - m2) / den;
    w[1] += (m2 - r0 * r0 * m0) / den;

    let (gx, gw) = gauss_points(dim);
    for c in 0..n - 1 {
        let (a, b) = (nodes[c], nodes[c + 1]);
        let (sa, sb) = (a * a, b * b);
        for (&t, &g) in gx.iter().zip(&gw) {
            let x = a + (b - a) * t;
            let meas = g * (b - a) * x.powi(dim as i32 - 1);
            let lam = (x * x - sa) / (sb - sa);
            w[c] += meas * (1.0 - lam);
            w[c + 1] += meas * lam;
        }
    }
    w.iter().map(|v| v * surface).collect()
}

fn linear_quadrature(nodes: &[f64], dim: usize, surface: f64) -> Vec<QuadPoint> {
    let (gx, gw) = gauss_points(dim);
    let nf = dim as f64;
    let mut out = Vec::with_capacity(1 + (nodes.len() - 1) * gx.len());
    out.push(QuadPoint { i: 0, j: 0, a: 1.0, b: 0.0, weight: surface * nodes[0].powf(nf) / nf });
    for c in 0..nodes.len() - 1 {
        let (lo, hi) = (nodes[c], nodes[c + 1]);
        for (&t, &w) in gx.iter().zip(&gw) {
            let x = lo + (hi - lo) * t;
            out.push(QuadPoint {
                i: c,
                j: c + 1,
                a: 1.0 - t,
                b: t,
                weight: surface * w * (hi - lo) * x.powi(dim as i32 - 1),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        let pi = std::f64::consts::PI;
        assert!((sphere_area(0) - 2.0).abs() < 1e-15);
        assert!((sphere_area(1) - 2.0 * pi).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * pi).abs() < 1e-13);
        assert!((sphere_area(3) - 2.0 * pi * pi).abs() < 1e-13);
        assert!((ball_volume(3) - 4.0 * pi / 3.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(RadialGrid::new(3, 7, GridKind::Uniform).is_err());
        assert!(RadialGrid::new(0, 100, GridKind::Uniform).is_err());
        assert!(RadialGrid::new(3, 100, GridKind::Graded { beta: -1.0 }).is_err());
    }

    #[test]
    fn last_node_is_one() {
        for kind in [GridKind::Uniform, GridKind::Graded { beta: 2.0 }] {
            let g = RadialGrid::new(4, 50, kind).unwrap();
            assert_eq!(*g.nodes().last().unwrap(), 1.0);
            assert!(g.nodes()[0] > 0.0);
        }
    }

    #[test]
    fn quadratic_exactness() {
        for dim in 1..9 {
            for kind in [GridKind::Uniform, GridKind::Graded { beta: 1.5 }] {
                let g = RadialGrid::new(dim, 20, kind).unwrap();
                let one = g.integrate(&vec![1.0; g.len()]);
                assert!((one / ball_volume(dim) - 1.0).abs() < 1e-12, "dim {dim}");
                let sq: Vec<f64> = g.nodes().iter().map(|r| r * r).collect();
                let exact = g.surface_area() / (dim as f64 + 2.0);
                assert!((g.integrate(&sq) / exact - 1.0).abs() < 1e-12, "dim {dim}");
            }
        }
    }

    #[test]
    fn linear_quadrature_measure() {
        let g = RadialGrid::new(5, 30, GridKind::Uniform).unwrap();
        let total: f64 = g.linear_quadrature().iter().map(|q| q.weight).sum();
        assert!((total / ball_volume(5) - 1.0).abs() < 1e-13);
        let cells: f64 = g.cell_weights().iter().sum();
        let inner = g.surface_area() * g.nodes()[0].powi(5) / 5.0;
        assert!(((cells + inner) / ball_volume(5) - 1.0).abs() < 1e-13);
    }
}
