//! Elementary scalar inequalities and the function `h(t) = ∫ |t u + φ|^{2*}`.

use crate::error::{Error, Result};
use crate::norms::{lp_power, lp_power_grad};
use crate::profile::Profile;
use crate::solver::ProblemSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `(x+y)^p − x^p − y^p − p x^{p−1} y − p x y^{p−1}` for `x, y ≥ 0`, `p ≥ 3`.
///
/// Evaluated as `m^p f(t)` with `m = max(x, y)` and `t = min/max` to keep
/// the leading cancellation out of the subtraction.
pub fn power_inequality_defect(x: f64, y: f64, p: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidArgument(format!("x, y must be finite and nonnegative, got ({x}, {y})")));
    }
    if !(p >= 3.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent must be at least 3, got {p}")));
    }
    let (m, s) = if x >= y { (x, y) } else { (y, x) };
    if m == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    let t = s / m;
    let f = (p * t.ln_1p()).exp_m1() - p * t - t.powf(p) - p * t.powf(p - 1.0);
    Ok(m.powf(p) * f)
}

/// The bracket `| |x+y|^p − |x|^p − |y|^p − p x y (|x|^{p−2} + |y|^{p−2}) |`
/// and the case-selected majorant with unit constant.
pub fn bn_lemma_defect(x: f64, y: f64, p: f64) -> Result<(f64, f64)> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent must exceed 2, got {p}")));
    }
    let (ax, ay) = (x.abs(), y.abs());
    let lhs = ((x + y).abs().powf(p) - ax.powf(p) - ay.powf(p)
        - p * x * y * (ax.powf(p - 2.0) + ay.powf(p - 2.0)))
    .abs();
    let bound = if ax <= ay { ax.powf(p - 1.0) * ay } else { ax * ay.powf(p - 1.0) };
    Ok((lhs, bound))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub samples: usize,
    pub violations: usize,
    pub worst_defect: f64,
    /// `(x, y, p)` at the worst defect.
    pub worst_location: [f64; 3],
}

/// Samples `(x, y) ∈ [0, x_max]²`, `p ∈ [p_lo, p_hi]` and counts defects
/// below `-slack`.
pub fn power_inequality_report(
    samples: usize,
    x_max: f64,
    p_range: (f64, f64),
    slack: f64,
    seed: u64,
) -> Result<InequalityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = InequalityReport {
        samples,
        violations: 0,
        worst_defect: f64::INFINITY,
        worst_location: [f64::NAN; 3],
    };
    for _ in 0..samples {
        let x = rng.gen_range(0.0..=x_max);
        let y = rng.gen_range(0.0..=x_max);
        let p = rng.gen_range(p_range.0..=p_range.1);
        let d = power_inequality_defect(x, y, p)?;
        if d < -slack {
            report.violations += 1;
        }
        if d < report.worst_defect {
            report.worst_defect = d;
            report.worst_location = [x, y, p];
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub p: f64,
    pub samples: usize,
    /// `sup lhs / bound` over the samples with a positive majorant.
    pub c_hat: f64,
    pub argmax: [f64; 2],
}

/// Empirical smallest constant in the lemma over `(x, y) ∈ [−half, half]²`.
pub fn bn_constant_estimate(p: f64, samples: usize, half: f64, seed: u64) -> Result<ConstantEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut est = ConstantEstimate { p, samples, c_hat: 0.0, argmax: [0.0; 2] };
    for _ in 0..samples {
        let x = rng.gen_range(-half..=half);
        let y = rng.gen_range(-half..=half);
        let (lhs, bound) = bn_lemma_defect(x, y, p)?;
        if bound > 0.0 {
            let ratio = lhs / bound;
            if ratio > est.c_hat {
                est.c_hat = ratio;
                est.argmax = [x, y];
            }
        }
    }
    Ok(est)
}

/// `h(t) = ∫ |t u + φ|^{2*}` and `h′(t)`.
pub fn h_function(t: f64, u: &Profile, phi: &Profile, spec: &ProblemSpec) -> Result<(f64, f64)> {
    if !u.same_grid(phi) {
        return Err(Error::GridMismatch);
    }
    let p = spec.exponent();
    let grid = u.grid();
    let w: Vec<f64> = u.values().iter().zip(phi.values()).map(|(a, b)| t * a + b).collect();
    let h = lp_power(grid, &w, p);
    let grad = lp_power_grad(grid, &w, p);
    let hp = grad.iter().zip(u.values()).map(|(g, v)| g * v).sum();
    Ok((h, hp))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_case_and_axis() {
        assert!(power_inequality_defect(1.0, 1.0, 3.0).unwrap().abs() < 1e-14);
        assert_eq!(power_inequality_defect(2.5, 0.0, 4.2).unwrap(), 0.0);
        assert_eq!(power_inequality_defect(0.0, 7.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn integer_exponent_matches_expansion() {
        // p = 4: 4x^3y + 6x^2y^2 + 4xy^3 − 4x^3y − 4xy^3 = 6x^2y^2.
        let d = power_inequality_defect(1.3, 0.7, 4.0).unwrap();
        assert!((d - 6.0 * 1.69 * 0.49).abs() < 1e-12);
    }

    #[test]
    fn domain_is_checked() {
        assert!(power_inequality_defect(-1.0, 1.0, 3.0).is_err());
        assert!(power_inequality_defect(1.0, 1.0, 2.9).is_err());
        assert!(bn_lemma_defect(1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn lemma_bracket_vanishes_on_axes() {
        assert_eq!(bn_lemma_defect(0.0, 3.0, 2.5).unwrap().0, 0.0);
        assert_eq!(bn_lemma_defect(-2.0, 0.0, 2.5).unwrap().0, 0.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = bn_constant_estimate(2.5, 1000, 5.0, 7).unwrap();
        let b = bn_constant_estimate(2.5, 1000, 5.0, 7).unwrap();
        assert_eq!(a, b);
    }
}
