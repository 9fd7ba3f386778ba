//! Augmented Lagrangian on the power-form constraint `g = ∫|u+φ|^p − 1`.

use super::lbfgs::{minimize, LbfgsOptions};
use super::space::ReducedProblem;

/// `Φ(c) = E(c) − λ g(c) + (μ/2) g(c)^2` with `E(c) = ‖B c‖_r^2`.
#[derive(Debug, Clone)]
pub struct AugmentedLagrangian<'a> {
    pub problem: &'a ReducedProblem,
    pub phi: &'a [f64],
    pub lambda: f64,
    pub mu: f64,
}

impl<'a> AugmentedLagrangian<'a> {
    pub fn new(problem: &'a ReducedProblem, phi: &'a [f64], lambda: f64, mu: f64) -> Self {
        AugmentedLagrangian { problem, phi, lambda, mu }
    }

    pub fn constraint(&self, c: &[f64]) -> f64 {
        self.problem.g_total(&self.problem.embed(c), self.phi) - 1.0
    }

    /// Value and gradient in free coordinates.
    pub fn value_grad(&self, c: &[f64]) -> (f64, Vec<f64>) {
        let u = self.problem.embed(c);
        let y = self.problem.to_y(c);
        let e: f64 = y.iter().map(|v| v * v).sum();
        let g = self.problem.g_total(&u, self.phi) - 1.0;
        let dg = self.problem.g_grad_c(&u, self.phi);
        let ry = self.problem.factor.tr_mul(&nalgebra::DVector::from_column_slice(&y));
        let coef = -self.lambda + self.mu * g;
        let grad = ry.iter().zip(&dg).map(|(a, b)| 2.0 * a + coef * b).collect();
        (e - self.lambda * g + 0.5 * self.mu * g * g, grad)
    }

    pub fn value(&self, c: &[f64]) -> f64 {
        self.value_grad(c).0
    }

    /// Value and gradient in whitened coordinates `y = R c`.
    pub fn value_grad_y(&self, y: &[f64]) -> (f64, Vec<f64>) {
        let c = self.problem.from_y(y);
        let u = self.problem.embed(&c);
        let e: f64 = y.iter().map(|v| v * v).sum();
        let g = self.problem.g_total(&u, self.phi) - 1.0;
        let dg = self.problem.grad_to_y(&self.problem.g_grad_c(&u, self.phi));
        let coef = -self.lambda + self.mu * g;
        let grad = y.iter().zip(&dg).map(|(a, b)| 2.0 * a + coef * b).collect();
        (e - self.lambda * g + 0.5 * self.mu * g * g, grad)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlOutcome {
    pub c: Vec<f64>,
    /// Multiplier of the power-form constraint.
    pub lambda: f64,
    pub constraint: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub inner_converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Outer multiplier/penalty loop with whitened L-BFGS inner solves.
/// `inner_tol` is relative to `1 + ‖R c‖`.
pub fn run(
    problem: &ReducedProblem,
    phi: &[f64],
    c0: &[f64],
    constraint_tol: f64,
    inner_tol: f64,
    max_outer: usize,
    max_inner: usize,
) -> AlOutcome {
    let mut y = problem.to_y(c0);
    let u0 = problem.embed(c0);
    let dg0 = problem.grad_to_y(&problem.g_grad_c(&u0, phi));
    let dgn2 = dg0.iter().map(|v| v * v).sum::<f64>().max(1e-300);
    let mut lambda = 2.0 * y.iter().zip(&dg0).map(|(a, b)| a * b).sum::<f64>() / dgn2;
    let mut mu = 10.0 / dgn2;
    let mut g_prev = f64::INFINITY;
    let mut inner_total = 0;
    let mut inner_converged = false;
    let mut constraint = f64::NAN;
    let mut outer = 0;
    while outer < max_outer {
        outer += 1;
        let al = AugmentedLagrangian::new(problem, phi, lambda, mu);
        let scale = 1.0 + norm(&y);
        let opts = LbfgsOptions { grad_tol: inner_tol * scale, max_iter: max_inner, ..Default::default() };
        let out = minimize(|v| al.value_grad_y(v), y.clone(), &opts);
        inner_total += out.iterations;
        inner_converged = out.converged;
        y = out.x;
        let c = problem.from_y(&y);
        constraint = al.constraint(&c);
        if constraint.abs() < constraint_tol {
            // Refresh the multiplier once more and stop.
            lambda -= mu * constraint;
            break;
        }
        lambda -= mu * constraint;
        if constraint.abs() > 0.25 * g_prev {
            mu *= 10.0;
        }
        g_prev = constraint.abs();
    }
    AlOutcome {
        c: problem.from_y(&y),
        lambda,
        constraint,
        outer_iterations: outer,
        inner_iterations: inner_total,
        inner_converged,
    }
}
