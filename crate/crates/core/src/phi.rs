//! Shift profiles `φ` matching the hypotheses of the three gap/equality cases.

use crate::bc::{BoundaryCondition, DiscreteSpace};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::norms::{critical_exponent, lp_norm, Seminorm};
use crate::profile::Profile;
use crate::solver::ReducedProblem;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiKind {
    /// `exp(−2ρ²)`: smooth and positive, nonzero on the boundary.
    ConstantSignBump,
    /// Smooth bump supported in `ρ < 0.8`, inside the discrete Dirichlet space.
    H0Member,
    /// Navier-space profile orthogonal to the Dirichlet space in `⟨·,·⟩_r`.
    ThetaOrthogonal,
}

impl PhiKind {
    pub const ALL: [PhiKind; 3] = [PhiKind::ConstantSignBump, PhiKind::H0Member, PhiKind::ThetaOrthogonal];

    pub fn name(self) -> &'static str {
        match self {
            PhiKind::ConstantSignBump => "constant_sign_bump",
            PhiKind::H0Member => "h0_member",
            PhiKind::ThetaOrthogonal => "theta_orthogonal",
        }
    }
}

impl fmt::Display for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhiKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PhiKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown phi kind `{s}`")))
    }
}

fn compact_bump(rho: f64) -> f64 {
    let s = rho / 0.8;
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Removes the `⟨·,·⟩_r`-projection of `v` onto the discrete Dirichlet space.
pub fn remove_dirichlet_component(v: &[f64], dirichlet: &ReducedProblem) -> Vec<f64> {
    let b = dirichlet.space.restrict(&dirichlet.seminorm.normal_apply(v));
    let r = &dirichlet.factor;
    let z = r.tr_solve_upper_triangular(&DVector::from_vec(b)).expect("nonsingular factor");
    let c = r.solve_upper_triangular(&z).expect("nonsingular factor");
    let proj = dirichlet.embed(c.as_slice());
    v.iter().zip(&proj).map(|(a, b)| a - b).collect()
}

/// Builds `φ` of the given kind with `‖φ‖_{2*} = target_norm`.
pub fn make_phi(kind: PhiKind, target_norm: f64, grid: Arc<RadialGrid>, r: usize) -> Result<Profile> {
    if !(target_norm > 0.0 && target_norm.is_finite()) {
        return Err(Error::InvalidArgument(format!("target norm must be positive, got {target_norm}")));
    }
    let p = critical_exponent(grid.dim(), r)?;
    let seed: Vec<f64> = match kind {
        PhiKind::ConstantSignBump => grid.nodes().iter().map(|x| (-2.0 * x * x).exp()).collect(),
        PhiKind::H0Member => {
            let raw: Vec<f64> = grid.nodes().iter().map(|&x| compact_bump(x)).collect();
            DiscreteSpace::new(grid.clone(), r, BoundaryCondition::Dirichlet)?.enforce_values(&raw)
        }
        PhiKind::ThetaOrthogonal => {
            let navier = DiscreteSpace::new(grid.clone(), r, BoundaryCondition::Navier)?;
            let raw: Vec<f64> = grid.nodes().iter().map(|x| (std::f64::consts::FRAC_PI_2 * x).cos()).collect();
            let s = navier.enforce_values(&raw);
            let dirichlet = ReducedProblem::new(grid.clone(), r, BoundaryCondition::Dirichlet)?;
            let v = remove_dirichlet_component(&s, &dirichlet);
            let semi = Seminorm::from_grid(&grid, r);
            if semi.energy(&v) <= 1e-20 * semi.energy(&s) {
                return Err(Error::ZeroSeed);
            }
            v
        }
    };
    let prof = Profile::new(grid, seed)?;
    let nrm = lp_norm(&prof, p)?;
    if !(nrm > 0.0) {
        return Err(Error::ZeroSeed);
    }
    Ok(prof.scaled(target_norm / nrm))
}
