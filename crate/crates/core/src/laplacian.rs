//! Radial Laplacian of profiles and its iterates.

use crate::bc::{BoundaryCondition, DiscreteSpace};
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::stencil::{laplacian_matrix, StencilOrder};
use num_traits::Float;
use std::sync::Arc;

/// `Δu = u'' + (N-1) u' / rho`, second-order stencils with the even ghost rule.
pub fn radial_laplacian(u: &Profile) -> Profile {
    radial_laplacian_with(u, StencilOrder::Second)
}

pub fn radial_laplacian_with(u: &Profile, order: StencilOrder) -> Profile {
    let g = u.grid();
    let l = laplacian_matrix(g.nodes(), g.dim(), order);
    u.with_values(l.mul_vec(u.values())).expect("laplacian of a finite profile is finite")
}

/// `(-Δ)^j` applied to raw values in any float type, without boundary handling.
pub fn iterated_negative_laplacian<T: Float>(nodes: &[T], values: &[T], dim: usize, j: usize, order: StencilOrder) -> Vec<T> {
    let l = laplacian_matrix(nodes, dim, order);
    let mut v = values.to_vec();
    for _ in 0..j {
        v = l.mul_vec(&v).into_iter().map(|x| -x).collect();
    }
    v
}

/// `(-Δ)^j u` for `0 <= j <= r`.
///
/// `u` is first projected onto the essential-BC subspace of `bc`; for Navier
/// this makes the first `ceil(r/2)` iterates vanish at the boundary node.
pub fn iterated_laplacian(u: &Profile, j: usize, bc: BoundaryCondition, r: usize) -> Result<Profile> {
    if j > r {
        return Err(Error::OrderTooHigh { j, r });
    }
    let g = u.grid();
    let l = laplacian_matrix(g.nodes(), g.dim(), StencilOrder::Second);
    let space = DiscreteSpace::with_laplacian(Arc::clone(g), &l, r, bc)?;
    let mut v = space.enforce_values(u.values());
    for _ in 0..j {
        v = l.mul_vec(&v).into_iter().map(|x| -x).collect();
    }
    u.with_values(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridKind, RadialGrid};

    #[test]
    fn constants_are_harmonic() {
        let g = Arc::new(RadialGrid::new(3, 40, GridKind::Uniform).unwrap());
        let u = Profile::from_fn(g, |_| 1.0).unwrap();
        assert!(radial_laplacian(&u).max_abs() < 1e-10);
    }

    #[test]
    fn rejects_high_order() {
        let g = Arc::new(RadialGrid::new(3, 40, GridKind::Uniform).unwrap());
        let u = Profile::zeros(g);
        assert!(iterated_laplacian(&u, 3, BoundaryCondition::Navier, 2).is_err());
    }
}
