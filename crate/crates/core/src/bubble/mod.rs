//! Aubin–Talenti bubbles centred at the origin.

mod asymptotics;
mod coeffs;
mod oracle;

pub use asymptotics::{bubble_norms, constant_d_integral, fit_exponent, richardson, BubbleAsymptotics, BubbleNormSample};
pub use coeffs::{binomial, coeff_d, coeff_e, coeff_g_printed, coeff_k, derived_numerators, CoeffDefect, CoeffTable};
pub use oracle::{verify_closed_form, ClosedFormCheck, OrderCheck};

use crate::error::{Error, Result};
use crate::stencil::div;
use num_traits::Float;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cutoff {
    None,
    /// `ξ = 1` on `[0, R/2]`, `ξ = 0` on `[R, ∞)`, smooth in between.
    Smooth { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleSpec {
    pub epsilon: f64,
    pub cutoff: Cutoff,
}

impl BubbleSpec {
    pub fn new(epsilon: f64, cutoff: Cutoff) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if let Cutoff::Smooth { radius } = cutoff {
            if !(radius > 0.0 && radius <= 1.0) {
                return Err(Error::InvalidArgument(format!("cutoff radius must lie in (0, 1], got {radius}")));
            }
        }
        Ok(BubbleSpec { epsilon, cutoff })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, Cutoff::None)
    }
}

fn psi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth cutoff factor `ξ(t)`.
pub fn cutoff_factor(cutoff: Cutoff, t: f64) -> f64 {
    match cutoff {
        Cutoff::None => 1.0,
        Cutoff::Smooth { radius } => {
            let half = 0.5 * radius;
            if t <= half {
                1.0
            } else if t >= radius {
                0.0
            } else {
                let s = (t - half) / half;
                let (a, b) = (psi(1.0 - s), psi(s));
                a / (a + b)
            }
        }
    }
}

/// `(ε² + t²)^{-e/2}` for an integer `e`, avoiding fractional powers.
fn inv_half_power<T: Float>(base: T, e: i32) -> T {
    let whole = base.powi(e / 2);
    if e % 2 == 0 {
        div(T::one(), whole)
    } else {
        div(T::one(), whole * base.sqrt())
    }
}

/// Pure bubble `ε^{a} / (ε² + t²)^{a}`, `a = (N - 2r)/2`, in any float type.
pub fn pure_bubble<T: Float>(epsilon: T, dim: usize, r: usize, t: T) -> T {
    let e = dim as i32 - 2 * r as i32;
    let base = epsilon * epsilon + t * t;
    let eps_pow = if e % 2 == 0 { epsilon.powi(e / 2) } else { epsilon.powi(e / 2) * epsilon.sqrt() };
    eps_pow * inv_half_power(base, e)
}

pub fn bubble_eval(spec: &BubbleSpec, dim: usize, r: usize, t: f64) -> f64 {
    pure_bubble(spec.epsilon, dim, r, t) * cutoff_factor(spec.cutoff, t)
}

fn check_closed_form(spec: &BubbleSpec, j: usize, r: usize) -> Result<()> {
    if spec.cutoff != Cutoff::None {
        return Err(Error::CutoffUnsupported);
    }
    if j > r {
        return Err(Error::OrderTooHigh { j, r });
    }
    Ok(())
}

/// `(-Δ)^j u_ε(t) = ε^{a+2j} Σ_i G(i,j) ε^{-2i} t^{2i} / (ε² + t²)^{a+2j}` with the derived coefficients.
pub fn bubble_polyharmonic(spec: &BubbleSpec, dim: usize, r: usize, j: usize, t: f64) -> Result<f64> {
    check_closed_form(spec, j, r)?;
    let table = derived_numerators(dim, r, j);
    Ok(polyharmonic_with(&table[j], spec.epsilon, dim, r, j, t, true))
}

/// The same closed form with the printed coefficient products and prefactor.
pub fn bubble_polyharmonic_printed(spec: &BubbleSpec, dim: usize, r: usize, j: usize, t: f64) -> Result<f64> {
    check_closed_form(spec, j, r)?;
    let g: Vec<i128> = (0..=j).map(|i| coeff_g_printed(i, j, dim, r)).collect();
    Ok(polyharmonic_with(&g, spec.epsilon, dim, r, j, t, false))
}

/// Evaluates the closed form for coefficient list `g`; `scaled` selects the
/// per-term `ε^{-2i}` factor.
pub fn polyharmonic_with<T: Float>(g: &[i128], epsilon: T, dim: usize, r: usize, j: usize, t: T, scaled: bool) -> T {
    let e = dim as i32 - 2 * r as i32 + 4 * j as i32;
    let base = epsilon * epsilon + t * t;
    let eps_pre = if e % 2 == 0 { epsilon.powi(e / 2) } else { epsilon.powi(e / 2) * epsilon.sqrt() };
    let x = t * t;
    let mut sum = T::zero();
    let mut xp = T::one();
    let e2 = epsilon * epsilon;
    let mut ep = T::one();
    for &c in g {
        let term = T::from(c as f64).unwrap() * xp;
        sum = sum + if scaled { div(term, ep) } else { term };
        xp = xp * x;
        ep = ep * e2;
    }
    eps_pre * sum * inv_half_power(base, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin_and_scaling() {
        for (n, r) in [(3usize, 1usize), (5, 2), (7, 3), (6, 2)] {
            let eps = 0.37;
            let s = BubbleSpec::pure(eps).unwrap();
            let a = (n as f64 - 2.0 * r as f64) / 2.0;
            assert!((bubble_eval(&s, n, r, 0.0) / eps.powf(-a) - 1.0).abs() < 1e-14);
            let one = BubbleSpec::pure(1.0).unwrap();
            for t in [0.1, 0.5, 2.0] {
                let lhs = bubble_eval(&s, n, r, t);
                let rhs = eps.powf(-a) * bubble_eval(&one, n, r, t / eps);
                assert!((lhs / rhs - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cutoff_support() {
        let s = BubbleSpec::new(0.2, Cutoff::Smooth { radius: 0.8 }).unwrap();
        assert_eq!(bubble_eval(&s, 5, 2, 0.8), 0.0);
        assert_eq!(bubble_eval(&s, 5, 2, 0.95), 0.0);
        assert_eq!(cutoff_factor(s.cutoff, 0.3), 1.0);
        assert!(bubble_polyharmonic(&s, 5, 2, 1, 0.1).is_err());
        assert!(BubbleSpec::new(0.0, Cutoff::None).is_err());
        assert!(BubbleSpec::new(0.1, Cutoff::Smooth { radius: 1.5 }).is_err());
    }

    #[test]
    fn closed_form_j0_is_the_bubble() {
        let s = BubbleSpec::pure(0.3).unwrap();
        for t in [0.0, 0.2, 0.9] {
            let v = bubble_polyharmonic(&s, 7, 3, 0, t).unwrap();
            assert!((v / bubble_eval(&s, 7, 3, t) - 1.0).abs() < 1e-14);
        }
    }
}
