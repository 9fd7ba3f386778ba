//! Norms of the bubble as the concentration scale shrinks.

use super::{bubble_eval, BubbleSpec};
use crate::error::{Error, Result};
use crate::grid::{sphere_area, RadialGrid};
use crate::norms::{critical_exponent, lp_power, Seminorm};
use crate::quad::adaptive_simpson;
use serde::{Deserialize, Serialize};

/// `∫_{R^N} (1 + |y|^2)^{-(N+2r)/2} dy`, computed after substituting `rho = tan θ`.
pub fn constant_d_integral(dim: usize, r: usize) -> f64 {
    let (a, b) = (dim as i32 - 1, 2 * r as i32 - 1);
    let f = |th: f64| th.sin().powi(a) * th.cos().powi(b);
    sphere_area(dim - 1) * adaptive_simpson(&f, 0.0, std::f64::consts::FRAC_PI_2, 1e-13)
}

/// Two-point Richardson limit for `E(ε) = K + c ε^α`.
pub fn richardson(e1: f64, v1: f64, e2: f64, v2: f64, alpha: f64) -> f64 {
    let (p1, p2) = (e1.powf(alpha), e2.powf(alpha));
    (p1 * v2 - p2 * v1) / (p1 - p2)
}

/// Exponent `α` with `(v1 - v2)/(v2 - v3) = (ε1^α - ε2^α)/(ε2^α - ε3^α)`, by bisection.
pub fn fit_exponent(eps: [f64; 3], vals: [f64; 3]) -> Option<f64> {
    let target = (vals[0] - vals[1]) / (vals[1] - vals[2]);
    if !target.is_finite() || target <= 0.0 {
        return None;
    }
    let model = |a: f64| (eps[0].powf(a) - eps[1].powf(a)) / (eps[1].powf(a) - eps[2].powf(a));
    let (mut lo, mut hi) = (1e-3, 30.0);
    let (flo, fhi) = (model(lo) - target, model(hi) - target);
    if flo * fhi > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (model(mid) - target) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleNormSample {
    pub epsilon: f64,
    pub seminorm_sq: f64,
    pub lp_norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleAsymptotics {
    pub dim: usize,
    pub r: usize,
    pub samples: Vec<BubbleNormSample>,
    /// Richardson limits of `‖u_ε‖_r^2` for consecutive pairs, exponent `N - 2r`.
    pub k_pairs: Vec<f64>,
    pub k_hat: f64,
    /// Limit of `‖u_ε‖^2_{L^{2*}}` (smallest-pair Richardson value).
    pub lp_sq_hat: f64,
    pub sobolev_hat: f64,
    /// Free-exponent fit on the last three samples, if the trend is monotone.
    pub fitted_exponent: Option<f64>,
    /// Relative spread of `‖u_ε‖_{L^{2*}}` across the sweep.
    pub lp_drift: f64,
}

impl BubbleAsymptotics {
    /// Largest relative disagreement between consecutive Richardson limits.
    pub fn k_stability(&self) -> f64 {
        self.k_pairs
            .windows(2)
            .map(|w| ((w[0] - w[1]) / w[1]).abs())
            .fold(0.0, f64::max)
    }
}

/// Grid spacing near radius `t`.
fn local_spacing(grid: &RadialGrid, t: f64) -> f64 {
    let x = grid.nodes();
    let k = x.partition_point(|&v| v < t).min(x.len() - 1).max(1);
    (x[k] - x[k - 1]).max(if k == 1 { 2.0 * x[0] } else { 0.0 })
}

/// Discrete `‖u_ε‖_r^2` and `‖u_ε‖^2_{L^{2*}}` over the sweep, with extrapolated limits.
pub fn bubble_norms(template: &BubbleSpec, epsilons: &[f64], dim: usize, r: usize, grid: &RadialGrid) -> Result<BubbleAsymptotics> {
    let p = critical_exponent(dim, r)?;
    if epsilons.len() < 2 {
        return Err(Error::InvalidArgument("need at least two epsilon values".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("epsilon values must decrease".into()));
    }
    if grid.dim() != dim {
        return Err(Error::InvalidArgument("grid dimension mismatch".into()));
    }
    for &e in epsilons {
        let hloc = local_spacing(grid, e);
        if e < 5.0 * hloc {
            return Err(Error::UnderResolved { epsilon: e, min: 5.0 * hloc });
        }
    }
    let semi = Seminorm::from_grid(grid, r);
    let samples: Vec<BubbleNormSample> = epsilons
        .iter()
        .map(|&e| {
            let spec = BubbleSpec { epsilon: e, cutoff: template.cutoff };
            let u: Vec<f64> = grid.nodes().iter().map(|&t| bubble_eval(&spec, dim, r, t)).collect();
            BubbleNormSample {
                epsilon: e,
                seminorm_sq: semi.energy(&u),
                lp_norm_sq: lp_power(grid, &u, p).powf(2.0 / p),
            }
        })
        .collect();
    let alpha = dim as f64 - 2.0 * r as f64;
    let k_pairs: Vec<f64> = samples
        .windows(2)
        .map(|w| richardson(w[0].epsilon, w[0].seminorm_sq, w[1].epsilon, w[1].seminorm_sq, alpha))
        .collect();
    let k_hat = *k_pairs.last().unwrap();
    let m = samples.len();
    let lp_sq_hat = richardson(
        samples[m - 2].epsilon,
        samples[m - 2].lp_norm_sq,
        samples[m - 1].epsilon,
        samples[m - 1].lp_norm_sq,
        alpha,
    );
    let fitted_exponent = if m >= 3 {
        let s = &samples[m - 3..];
        fit_exponent(
            [s[0].epsilon, s[1].epsilon, s[2].epsilon],
            [s[0].seminorm_sq, s[1].seminorm_sq, s[2].seminorm_sq],
        )
    } else {
        None
    };
    let norms: Vec<f64> = samples.iter().map(|s| s.lp_norm_sq.sqrt()).collect();
    let (lo, hi) = norms.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(BubbleAsymptotics {
        dim,
        r,
        samples,
        k_pairs,
        k_hat,
        lp_sq_hat,
        sobolev_hat: k_hat / lp_sq_hat,
        fitted_exponent,
        lp_drift: (hi - lo) / hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_leading_term() {
        let f = |e: f64| 3.0 + 2.0 * e.powf(1.5);
        let k = richardson(0.4, f(0.4), 0.2, f(0.2), 1.5);
        assert!((k - 3.0).abs() < 1e-13);
        let a = fit_exponent([0.4, 0.2, 0.1], [f(0.4), f(0.2), f(0.1)]).unwrap();
        assert!((a - 1.5).abs() < 1e-9);
    }

    #[test]
    fn constant_d_one_dimension() {
        assert!((constant_d_integral(1, 1) - 2.0).abs() < 1e-10);
        assert!(constant_d_integral(4, 2) < constant_d_integral(4, 1));
    }
}
