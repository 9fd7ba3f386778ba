use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension N={n} must exceed 2r={two_r}")]
    SubcriticalDimension { n: usize, two_r: usize },
    #[error("iterate order j={j} exceeds r={r}")]
    OrderTooHigh { j: usize, r: usize },
    #[error("profile violates essential boundary conditions (residual {residual:.3e} > {tol:.1e})")]
    BoundaryViolation { residual: f64, tol: f64 },
    #[error("closed form only holds for the pure bubble (cutoff configured)")]
    CutoffUnsupported,
    #[error("epsilon {epsilon} is under-resolved on this grid (needs >= {min})")]
    UnderResolved { epsilon: f64, min: f64 },
    #[error("degenerate multiplier: bracket {bracket:.3e} vanishes")]
    DegenerateMultiplier { bracket: f64 },
    #[error("norm of phi must be below one (got {0})")]
    NormNotBelowOne(f64),
    #[error("cannot scale a zero seed profile to a target norm")]
    ZeroSeed,
    #[error("profile lives on a different grid")]
    GridMismatch,
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}
