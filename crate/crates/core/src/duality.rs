//! Convex duality for the constrained problem in the regime `‖φ‖_{2*} > 1`.
//!
//! With `T` the seminorm operator and `W` its weights, the Lagrangian is
//! `L(u, p) = −½|p|_W^2 − ⟨T u, p⟩_W`, so `sup_p L(u, ·) = ½‖u‖_r^2` at
//! `p = −T u`. A dual variable `p` acts on nodal profiles through the
//! covector `T^T W p`. Its representer is the piecewise-linear `p̃` in the
//! Navier space with `∫ p̃ v = ⟨T v, p⟩_W` for every Navier-space `v`; the
//! boundary terms of the integration by parts drop out on that space, and the
//! Dirichlet space is contained in it.

use crate::bc::{BoundaryCondition, DiscreteSpace};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::norms::{lp_power, pairing, Seminorm};
use crate::profile::Profile;
use crate::solver::{ProblemSpec, ReducedProblem, SolveResult};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Operators shared by all dual evaluations on one grid.
#[derive(Debug, Clone)]
pub struct DualProblem {
    grid: Arc<RadialGrid>,
    r: usize,
    exponent: f64,
    seminorm: Seminorm,
    space: DiscreteSpace,
    /// Cholesky factor of `B^T M B` with `M` the mass matrix.
    reduced_mass: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

/// A dual variable together with its representer.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    p: Vec<f64>,
    ptilde: Profile,
}

impl DualPoint {
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn ptilde(&self) -> &Profile {
        &self.ptilde
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderDual {
    /// `‖p̃‖_{q′}`.
    pub closed_form: f64,
    /// `∫ p̃ v*` for the pointwise maximizer `v* ∝ sign(p̃)|p̃|^{q′−1}`.
    pub attained: f64,
    /// `∫ p̃ v` for the nodal interpolant of `v*`, normalized.
    pub nodal_attained: f64,
}

impl HolderDual {
    pub fn attainment_error(&self) -> f64 {
        if self.closed_form == 0.0 {
            self.attained.abs()
        } else {
            (self.attained - self.closed_form).abs() / self.closed_form
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPair {
    /// Closed form over the Navier space.
    pub theta: f64,
    /// Closed form over the Dirichlet space.
    pub zero: f64,
    pub direct_theta: f64,
    pub direct_zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub dual_value: f64,
    pub primal_value: f64,
    /// `primal/2 − dual`.
    pub gap: f64,
    pub relative_gap: f64,
    pub beta_theta: f64,
    pub beta_zero: f64,
    pub holder: HolderDual,
    /// `|Λ|`, to compare with `holder.closed_form` at the witness.
    pub multiplier_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakDualitySweep {
    pub samples: usize,
    pub violations: usize,
    /// `max(dual − primal/2)` over the samples.
    pub max_excess: f64,
}

impl DualProblem {
    pub fn new(grid: Arc<RadialGrid>, r: usize) -> Result<Self> {
        let exponent = crate::norms::critical_exponent(grid.dim(), r)?;
        let seminorm = Seminorm::from_grid(&grid, r);
        let n = grid.len();
        let mut mass_diag = vec![0.0; n];
        let mut mass_off = vec![0.0; n.saturating_sub(1)];
        for q in grid.linear_quadrature() {
            mass_diag[q.i] += q.weight * q.a * q.a;
            if q.j != q.i {
                mass_diag[q.j] += q.weight * q.b * q.b;
                mass_off[q.i] += q.weight * q.a * q.b;
            } else {
                mass_diag[q.i] += q.weight * (2.0 * q.a * q.b + q.b * q.b);
            }
        }
        let mut mass = DMatrix::from_diagonal(&DVector::from_vec(mass_diag));
        for (k, &v) in mass_off.iter().enumerate() {
            mass[(k, k + 1)] = v;
            mass[(k + 1, k)] = v;
        }
        let space = DiscreteSpace::new(grid.clone(), r, BoundaryCondition::Navier)?;
        let basis = space.basis_matrix();
        let reduced_mass = (basis.transpose() * mass * &basis)
            .cholesky()
            .ok_or_else(|| Error::LinearAlgebra("mass matrix is not positive definite".into()))?;
        Ok(DualProblem { grid, r, exponent, seminorm, space, reduced_mass })
    }

    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        Self::new(spec.phi.grid().clone(), spec.r)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Number of entries of a dual variable.
    pub fn dual_len(&self) -> usize {
        self.seminorm.op.rows()
    }

    fn check_len(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dual_len() {
            return Err(Error::InvalidArgument(format!(
                "dual variable has {} entries, expected {}",
                p.len(),
                self.dual_len()
            )));
        }
        Ok(())
    }

    /// `T^T W p`.
    pub fn covector(&self, p: &[f64]) -> Vec<f64> {
        let wp: Vec<f64> = p.iter().zip(&self.seminorm.weights).map(|(a, w)| a * w).collect();
        self.seminorm.op.tr_mul_vec(&wp)
    }

    /// Navier-space `p̃` with `B^T M p̃ = B^T ℓ`.
    pub fn representer(&self, covector: &[f64]) -> Vec<f64> {
        let rhs = DVector::from_vec(self.space.restrict(covector));
        let z = self.reduced_mass.solve(&rhs);
        self.space.embed(z.as_slice())
    }

    pub fn point(&self, p: Vec<f64>) -> Result<DualPoint> {
        self.check_len(&p)?;
        let ptilde = Profile::new(self.grid.clone(), self.representer(&self.covector(&p)))?;
        Ok(DualPoint { p, ptilde })
    }

    /// `p_θ = −T u`.
    pub fn witness(&self, u: &[f64]) -> Vec<f64> {
        self.seminorm.apply(u).into_iter().map(|v| -v).collect()
    }

    fn weighted_sq(&self, p: &[f64]) -> f64 {
        p.iter().zip(&self.seminorm.weights).map(|(a, w)| w * a * a).sum()
    }

    pub fn lagrangian(&self, u: &[f64], p: &[f64]) -> Result<f64> {
        self.check_len(p)?;
        let tu = self.seminorm.apply(u);
        let pair: f64 = tu.iter().zip(p).zip(&self.seminorm.weights).map(|((a, b), w)| w * a * b).sum();
        Ok(-0.5 * self.weighted_sq(p) - pair)
    }

    /// Closed-form `β(p) = ‖p̃‖_{q′} − ∫ p̃ φ`, the same over either BC space.
    pub fn beta_closed(&self, point: &DualPoint, phi: &Profile) -> Result<f64> {
        let h = holder_dual_sup(point.ptilde(), self.exponent)?;
        Ok(h.closed_form - pairing(&self.grid, point.ptilde().values(), phi.values()))
    }

    pub fn dual_objective(&self, point: &DualPoint, phi: &Profile) -> Result<f64> {
        Ok(-0.5 * self.weighted_sq(point.p()) - self.beta_closed(point, phi)?)
    }
}

/// `sup_{‖v‖_q ≤ 1} ∫ p̃ v` in closed form and through explicit maximizers.
pub fn holder_dual_sup(ptilde: &Profile, q: f64) -> Result<HolderDual> {
    if !(q > 1.0) {
        return Err(Error::InvalidArgument(format!("exponent must exceed 1, got {q}")));
    }
    let qc = q / (q - 1.0);
    let grid = ptilde.grid();
    let pv = ptilde.values();
    let closed_form = lp_power(grid, pv, qc).powf(1.0 / qc);
    if closed_form == 0.0 {
        return Ok(HolderDual { closed_form, attained: 0.0, nodal_attained: 0.0 });
    }
    let (mut num, mut vq) = (0.0, 0.0);
    for pt in grid.linear_quadrature() {
        let t = pt.a * pv[pt.i] + pt.b * pv[pt.j];
        let v = t.signum() * t.abs().powf(qc - 1.0);
        num += pt.weight * t * v;
        vq += pt.weight * v.abs().powf(q);
    }
    let attained = num / vq.powf(1.0 / q);
    let nodal: Vec<f64> = pv.iter().map(|t| t.signum() * t.abs().powf(qc - 1.0)).collect();
    let nodal_norm = lp_power(grid, &nodal, q).powf(1.0 / q);
    let nodal_attained = pairing(grid, pv, &nodal) / nodal_norm;
    Ok(HolderDual { closed_form, attained, nodal_attained })
}

pub fn lagrangian(u: &Profile, p: &[f64], spec: &ProblemSpec) -> Result<f64> {
    if !u.same_grid(&spec.phi) {
        return Err(Error::GridMismatch);
    }
    DualProblem::from_spec(spec)?.lagrangian(u.values(), p)
}

pub fn dual_objective(p: &[f64], phi: &Profile, spec: &ProblemSpec) -> Result<f64> {
    let dp = DualProblem::from_spec(spec)?;
    let point = dp.point(p.to_vec())?;
    dp.dual_objective(&point, phi)
}

/// `sup { ⟨T u, p⟩_W : u in the discrete space, ‖u + φ‖_q = 1 }` by Newton on
/// the KKT system of the equivalent convex problem.
pub fn beta_direct(problem: &ReducedProblem, covector: &[f64], phi: &[f64]) -> Result<f64> {
    let ell = problem.space.restrict(covector);
    let ell_norm = ell.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ell_norm == 0.0 {
        return Ok(0.0);
    }
    let grid = &problem.grid;
    let q = problem.p;
    let qc = q / (q - 1.0);
    let nf = problem.free_dim();

    // Start from the interpolated Hoelder maximizer of the representer.
    let pt = DualProblem::new(grid.clone(), problem.r)?.representer(covector);
    let mut v: Vec<f64> = pt.iter().map(|t| t.signum() * t.abs().powf(qc - 1.0)).collect();
    let vn = lp_power(grid, &v, q).powf(1.0 / q);
    v.iter_mut().for_each(|x| *x /= vn);
    let u0: Vec<f64> = v.iter().zip(phi).map(|(a, b)| a - b).collect();
    let mut c = problem.free_part(&problem.space.enforce_values(&u0));
    let grad0 = problem.g_grad_c(&problem.embed(&c), phi);
    let mut mu = dot(&ell, &grad0) / dot(&grad0, &grad0);

    let residual = |c: &[f64], mu: f64| -> (Vec<f64>, f64) {
        let u = problem.embed(c);
        let g = problem.g_grad_c(&u, phi);
        let rc: Vec<f64> = g.iter().zip(&ell).map(|(gi, li)| mu * gi - li).collect();
        (rc, problem.g_total(&u, phi) - 1.0)
    };
    let merit = |rc: &[f64], rg: f64| (dot(rc, rc) / (ell_norm * ell_norm) + rg * rg).sqrt();

    let (mut rc, mut rg) = residual(&c, mu);
    let mut m = merit(&rc, rg);
    for _ in 0..200 {
        if m < 1e-13 {
            break;
        }
        let u = problem.embed(&c);
        let g = problem.g_grad_c(&u, phi);
        let h = problem.g_hess_c(&u, phi);
        let mut jac = DMatrix::zeros(nf + 1, nf + 1);
        jac.view_mut((0, 0), (nf, nf)).copy_from(&(h * mu));
        for i in 0..nf {
            jac[(i, nf)] = g[i];
            jac[(nf, i)] = g[i];
        }
        let mut rhs = DVector::zeros(nf + 1);
        for i in 0..nf {
            rhs[i] = -rc[i];
        }
        rhs[nf] = -rg;
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::LinearAlgebra("singular KKT matrix in dual maximization".into()))?;
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-10 {
            let cn: Vec<f64> = c.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            let mun = mu + t * step[nf];
            let (rcn, rgn) = residual(&cn, mun);
            let mn = merit(&rcn, rgn);
            if mn.is_finite() && mn < (1.0 - 1e-4 * t) * m {
                c = cn;
                mu = mun;
                rc = rcn;
                rg = rgn;
                m = mn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(dot(&ell, &c))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Closed-form and directly maximized `β` over both BC spaces.
pub fn beta_pair(p: &[f64], phi: &Profile, spec: &ProblemSpec) -> Result<BetaPair> {
    use crate::bc::BoundaryCondition::{Dirichlet, Navier};
    let dp = DualProblem::from_spec(spec)?;
    let point = dp.point(p.to_vec())?;
    let closed = dp.beta_closed(&point, phi)?;
    let cov = dp.covector(p);
    let grid = phi.grid().clone();
    let theta = ReducedProblem::new(grid.clone(), spec.r, Navier)?;
    let zero = ReducedProblem::new(grid, spec.r, Dirichlet)?;
    Ok(BetaPair {
        theta: closed,
        zero: closed,
        direct_theta: beta_direct(&theta, &cov, phi.values())?,
        direct_zero: beta_direct(&zero, &cov, phi.values())?,
    })
}

/// Dual value at the witness `p_θ = −T u_θ` built from a converged solve.
pub fn dual_check(spec: &ProblemSpec, solved: &SolveResult) -> Result<DualReport> {
    let dp = DualProblem::from_spec(spec)?;
    let point = dp.point(dp.witness(solved.minimizer.values()))?;
    let dual_value = dp.dual_objective(&point, &spec.phi)?;
    let betas = beta_pair(point.p(), &spec.phi, spec)?;
    let holder = holder_dual_sup(point.ptilde(), dp.exponent())?;
    let primal_value = solved.value;
    let gap = 0.5 * primal_value - dual_value;
    let relative_gap = if primal_value == 0.0 { gap.abs() } else { gap / (0.5 * primal_value) };
    Ok(DualReport {
        dual_value,
        primal_value,
        gap,
        relative_gap,
        beta_theta: betas.direct_theta,
        beta_zero: betas.direct_zero,
        holder,
        multiplier_abs: solved.multiplier.abs(),
    })
}

/// Dual values at random `p` with magnitudes spread over `10^{±5}`.
pub fn weak_duality_sweep(
    spec: &ProblemSpec,
    primal_value: f64,
    samples: usize,
    slack: f64,
    seed: u64,
) -> Result<WeakDualitySweep> {
    let dp = DualProblem::from_spec(spec)?;
    let len = dp.dual_len();
    let excess = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let scale = 10f64.powf(rng.gen_range(-5.0..5.0));
            let p: Vec<f64> = (0..len).map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
            let point = dp.point(p)?;
            Ok(dp.dual_objective(&point, &spec.phi)? - 0.5 * primal_value)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(WeakDualitySweep {
        samples,
        violations: excess.iter().filter(|&&e| e > slack).count(),
        max_excess: excess.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ball_volume, GridKind};

    fn setup(r: usize, dim: usize) -> DualProblem {
        let grid = Arc::new(RadialGrid::new(dim, 80, GridKind::Uniform).unwrap());
        DualProblem::new(grid, r).unwrap()
    }

    #[test]
    fn representer_reproduces_pairing() {
        for (dim, r) in [(5, 2), (3, 1)] {
            let dp = setup(r, dim);
            let x = dp.grid().nodes().to_vec();
            let p: Vec<f64> = (0..dp.dual_len()).map(|k| (k as f64 * 0.37).sin()).collect();
            let point = dp.point(p.clone()).unwrap();
            let v: Vec<f64> = x.iter().map(|t| (1.0 - t * t) * (2.0 * t).cos()).collect();
            let lhs = pairing(dp.grid(), point.ptilde().values(), &v);
            let tv = dp.seminorm.apply(&v);
            let rhs: f64 = tv.iter().zip(&p).zip(&dp.seminorm.weights).map(|((a, b), w)| w * a * b).sum();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn holder_constant_case() {
        let grid = Arc::new(RadialGrid::new(5, 60, GridKind::Uniform).unwrap());
        let q = 10.0;
        let c = -2.5;
        let pt = Profile::from_fn(grid, |_| c).unwrap();
        let h = holder_dual_sup(&pt, q).unwrap();
        let qc = q / (q - 1.0);
        let expected = c.abs() * ball_volume(5).powf(1.0 / qc);
        assert!((h.closed_form - expected).abs() < 1e-12 * expected);
        assert!(h.attainment_error() < 1e-12);
    }

    #[test]
    fn holder_zero() {
        let grid = Arc::new(RadialGrid::new(3, 40, GridKind::Uniform).unwrap());
        let h = holder_dual_sup(&Profile::zeros(grid), 6.0).unwrap();
        assert_eq!((h.closed_form, h.attained), (0.0, 0.0));
    }

    #[test]
    fn lagrangian_maximizer() {
        let dp = setup(2, 5);
        let u: Vec<f64> = dp.grid().nodes().iter().map(|t| (1.0 - t * t).powi(2)).collect();
        let p = dp.witness(&u);
        let half = 0.5 * dp.seminorm.energy(&u);
        assert!((dp.lagrangian(&u, &p).unwrap() - half).abs() < 1e-12 * half);
        let zero = vec![0.0; dp.dual_len()];
        assert_eq!(dp.lagrangian(&u, &zero).unwrap(), 0.0);
    }
}
