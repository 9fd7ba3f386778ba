//! Newton iteration on the first-order optimality system.

use super::space::ReducedProblem;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct KktOutcome {
    pub c: Vec<f64>,
    pub lambda: f64,
    pub stationarity: f64,
    pub constraint: f64,
    pub iterations: usize,
}

/// Whitened stationarity `‖R^{-T}(2 A c − λ ∇g)‖ / (1 + ‖R c‖)` and the constraint value.
pub fn kkt_residual(problem: &ReducedProblem, phi: &[f64], c: &[f64], lambda: f64) -> (f64, f64) {
    let u = problem.embed(c);
    let y = problem.to_y(c);
    let dg = problem.grad_to_y(&problem.g_grad_c(&u, phi));
    let r: f64 = y.iter().zip(&dg).map(|(a, b)| (2.0 * a - lambda * b).powi(2)).sum::<f64>().sqrt();
    let yn = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    (r / (1.0 + yn), problem.g_total(&u, phi) - 1.0)
}

/// Newton steps from `(c, λ)` in whitened coordinates `y = R c`; a step is
/// kept only if it lowers the combined residual.
pub fn polish(problem: &ReducedProblem, phi: &[f64], c0: &[f64], lambda0: f64, max_iter: usize, tol: f64) -> KktOutcome {
    let mut c = c0.to_vec();
    let mut lambda = lambda0;
    let (mut st, mut cg) = kkt_residual(problem, phi, &c, lambda);
    let merit = |s: f64, g: f64| s.max(g.abs());
    let r = &problem.factor;
    let nf = c.len();
    let mut it = 0;
    while it < max_iter && merit(st, cg) > tol {
        it += 1;
        let u = problem.embed(&c);
        let y = problem.to_y(&c);
        let dgy = problem.grad_to_y(&problem.g_grad_c(&u, phi));
        let hc = problem.g_hess_c(&u, phi);
        let Some(x) = r.tr_solve_upper_triangular(&hc) else { break };
        let Some(hy) = r.tr_solve_upper_triangular(&x.transpose()) else { break };
        let mut k = DMatrix::zeros(nf + 1, nf + 1);
        let mut rhs = DVector::zeros(nf + 1);
        for i in 0..nf {
            for j in 0..nf {
                k[(i, j)] = -lambda * hy[(i, j)];
            }
            k[(i, i)] += 2.0;
            k[(i, nf)] = -dgy[i];
            k[(nf, i)] = -dgy[i];
            rhs[i] = -(2.0 * y[i] - lambda * dgy[i]);
        }
        rhs[nf] = cg;
        let Some(step) = k.lu().solve(&rhs) else { break };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let yn: Vec<f64> = y.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            let cn = problem.from_y(&yn);
            let ln = lambda + t * step[nf];
            let (sn, gn) = kkt_residual(problem, phi, &cn, ln);
            if merit(sn, gn) < merit(st, cg) {
                c = cn;
                lambda = ln;
                st = sn;
                cg = gn;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    // Once stationarity sits at its round-off floor the merit no longer
    // decreases; finish feasibility along the energy-metric gradient of g.
    for _ in 0..5 {
        if cg.abs() <= tol {
            break;
        }
        let u = problem.embed(&c);
        let dg = problem.g_grad_c(&u, phi);
        let d = problem.from_y(&problem.grad_to_y(&dg));
        let slope: f64 = dg.iter().zip(&d).map(|(a, b)| a * b).sum();
        if !(slope > 0.0) {
            break;
        }
        let cn: Vec<f64> = c.iter().zip(&d).map(|(x, di)| x - cg / slope * di).collect();
        let (sn, gn) = kkt_residual(problem, phi, &cn, lambda);
        if gn.abs() >= cg.abs() {
            break;
        }
        c = cn;
        st = sn;
        cg = gn;
        it += 1;
    }
    KktOutcome { c, lambda, stationarity: st, constraint: cg, iterations: it }
}
