//! Radial discretization and verification toolkit for critical-exponent
//! polyharmonic minimization problems on the unit ball.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bc;
pub mod bubble;
pub mod duality;
pub mod error;
pub mod grid;
pub mod inequalities;
pub mod laplacian;
pub mod norms;
pub mod phi;
pub mod profile;
pub mod quad;
pub mod scenario;
pub mod sobolev;
pub mod solver;
pub mod sparse;
pub mod stencil;

pub use bc::{enforce_bc, BoundaryCondition, DiscreteSpace};
pub use error::{Error, Result};
pub use grid::{make_radial_grid, GridKind, RadialGrid};
pub use laplacian::{iterated_laplacian, radial_laplacian};
pub use norms::{critical_exponent, hr_seminorm_sq, lp_norm, Seminorm};
pub use profile::Profile;
pub use sobolev::{eps_upper_bound, sobolev_constant_estimate, SobolevConstant};
