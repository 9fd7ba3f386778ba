use critsob::bubble::{
    bubble_eval, bubble_norms, bubble_polyharmonic, coeff_d, coeff_e, coeff_k, constant_d_integral, verify_closed_form,
    BubbleSpec, CoeffTable, Cutoff,
};
use critsob::grid::sphere_area;
use critsob::{sobolev_constant_estimate, GridKind, RadialGrid};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn coefficient_examples() {
    assert_eq!(coeff_k(0, 9, 3), 1);
    assert_eq!(coeff_k(1, 5, 2), 1);
    assert_eq!(coeff_k(2, 6, 1), 24);
    assert_eq!(coeff_d(0, 3, 2), 1);
    assert_eq!(coeff_d(1, 1, 2), 2);
    assert_eq!(coeff_d(2, 2, 3), 6);
    assert_eq!(coeff_e(2, 2, 7), 1);
    assert_eq!(coeff_e(3, 1, 5), 0);
    assert_eq!(coeff_e(0, 2, 4), 24);
}

#[test]
fn coefficient_table_is_deterministic() {
    for (dim, r) in [(3, 1), (5, 2), (7, 3), (10, 3)] {
        assert_eq!(CoeffTable::new(dim, r), CoeffTable::new(dim, r));
    }
}

#[test]
fn bubble_value_at_origin_and_self_similarity() {
    let (dim, r) = (7, 2);
    for eps in [0.05, 0.3, 2.0] {
        let spec = BubbleSpec::pure(eps).unwrap();
        let peak = eps.powf(-(dim as f64 - 2.0 * r as f64) / 2.0);
        assert!(rel(bubble_eval(&spec, dim, r, 0.0), peak) < 1e-14);
        let unit = BubbleSpec::pure(1.0).unwrap();
        for t in [0.01, 0.4, 3.0] {
            let lhs = bubble_eval(&spec, dim, r, t);
            let rhs = peak * bubble_eval(&unit, dim, r, t / eps);
            assert!(rel(lhs, rhs) < 1e-13);
        }
    }
}

#[test]
fn cutoff_vanishes_outside_radius() {
    let spec = BubbleSpec::new(0.2, Cutoff::Smooth { radius: 0.6 }).unwrap();
    for t in [0.6, 0.61, 0.9, 1.0] {
        assert_eq!(bubble_eval(&spec, 5, 2, t), 0.0);
    }
    let pure = BubbleSpec::pure(0.2).unwrap();
    assert_eq!(bubble_eval(&spec, 5, 2, 0.25), bubble_eval(&pure, 5, 2, 0.25));
    assert!(BubbleSpec::new(0.2, Cutoff::Smooth { radius: 1.5 }).is_err());
    assert!(BubbleSpec::pure(0.0).is_err());
}

#[test]
fn closed_form_rejects_cutoff() {
    let spec = BubbleSpec::new(0.3, Cutoff::Smooth { radius: 1.0 }).unwrap();
    assert!(bubble_polyharmonic(&spec, 5, 2, 1, 0.2).is_err());
}

#[test]
fn closed_form_symbolic_point() {
    // -Δ (1 + t²)^{-3/2} = N (N - 2) (1 + t²)^{-(N + 2)/2} for N = 5.
    let spec = BubbleSpec::pure(1.0).unwrap();
    let v = bubble_polyharmonic(&spec, 5, 1, 1, 1.0).unwrap();
    assert!(rel(v, 15.0 * 2f64.powf(-3.5)) < 1e-14, "{v}");
}

#[test]
fn closed_form_decays_at_least_like_leading_power() {
    let spec = BubbleSpec::pure(0.5).unwrap();
    for (dim, r) in [(5, 2), (7, 3), (9, 3)] {
        for j in 1..=r {
            let at = |t: f64| bubble_polyharmonic(&spec, dim, r, j, t).unwrap().abs();
            let slope = (at(2e4) / at(1e4)).log2();
            let leading = -((dim - 2 * r + 2 * j) as f64);
            assert!(slope <= leading + 1e-3, "N={dim} r={r} j={j}: slope {slope}");
        }
    }
}

#[test]
fn closed_form_matches_finite_differences_on_all_small_cases() {
    for r in 1..=3 {
        for dim in 2 * r + 1..=2 * r + 4 {
            let check = verify_closed_form(dim, r, 0.3, 800, (0.05, 0.8)).unwrap();
            assert!(check.derived_passes(1e-4), "N={dim} r={r}: {:?}", check.orders);
        }
    }
}

#[test]
fn printed_coefficients_are_reported_when_wrong() {
    let check = verify_closed_form(5, 2, 0.3, 800, (0.05, 0.8)).unwrap();
    assert!(!check.printed_passes(1e-4));
    assert!(!CoeffTable::new(5, 2).defects().is_empty());
}

#[test]
fn constant_d_examples() {
    for dim in [3, 5, 8] {
        for r in 1..4 {
            assert!(constant_d_integral(dim, r + 1) < constant_d_integral(dim, r));
        }
    }
    assert!((constant_d_integral(1, 1) - 2.0).abs() < 1e-8);
    // ω_{N-1} / 2 · B(N/2, r)
    for (dim, r) in [(3, 1), (5, 2), (7, 3)] {
        let beta = statrs::function::beta::beta(dim as f64 / 2.0, r as f64);
        let oracle = sphere_area(dim - 1) / 2.0 * beta;
        assert!(rel(constant_d_integral(dim, r), oracle) < 1e-8, "N={dim} r={r}");
    }
}

fn graded(dim: usize) -> RadialGrid {
    RadialGrid::new(dim, 1600, GridKind::Graded { beta: 2.0 }).unwrap()
}

#[test]
fn seminorm_limit_extrapolates_with_expected_exponent() {
    let a = bubble_norms(&BubbleSpec::pure(0.4).unwrap(), &[0.4, 0.2, 0.1], 5, 2, &graded(5)).unwrap();
    assert!(a.k_hat > 0.0 && a.k_hat.is_finite());
    let e = a.fitted_exponent.expect("monotone trend");
    assert!((e - 1.0).abs() <= 0.7, "{e}");
    assert!(a.k_stability() < 0.03);
}

#[test]
fn bubble_ratio_is_consistent_with_sobolev_estimate() {
    let a = bubble_norms(&BubbleSpec::pure(0.4).unwrap(), &[0.4, 0.2, 0.1], 5, 2, &graded(5)).unwrap();
    let s = sobolev_constant_estimate(5, 2, &[50, 100, 200, 400]).unwrap();
    assert!(rel(a.sobolev_hat, s.estimate) < 0.05, "{} vs {}", a.sobolev_hat, s.estimate);
}

#[test]
fn cutoff_difference_shrinks() {
    let eps = [0.2, 0.1, 0.05];
    let g = graded(5);
    let cut = bubble_norms(&BubbleSpec::new(0.2, Cutoff::Smooth { radius: 1.0 }).unwrap(), &eps, 5, 2, &g).unwrap();
    let pure = bubble_norms(&BubbleSpec::pure(0.2).unwrap(), &eps, 5, 2, &g).unwrap();
    let diffs: Vec<f64> = cut
        .samples
        .iter()
        .zip(&pure.samples)
        .map(|(a, b)| (a.seminorm_sq - b.seminorm_sq).abs())
        .collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
    let rate = (diffs[1] / diffs[2]).log2();
    assert!(rate > 0.0, "{rate}");
}

#[test]
fn under_resolved_epsilon_is_rejected() {
    let g = RadialGrid::new(3, 50, GridKind::Uniform).unwrap();
    assert!(bubble_norms(&BubbleSpec::pure(0.4).unwrap(), &[0.4, 0.05], 3, 1, &g).is_err());
}

#[test]
fn lp_norm_drift_is_small_for_cut_bubbles() {
    let g = graded(5);
    let spec = BubbleSpec::new(0.1, Cutoff::Smooth { radius: 1.0 }).unwrap();
    let a = bubble_norms(&spec, &[0.1, 0.05, 0.025], 5, 2, &g).unwrap();
    assert!(a.lp_drift < 0.02, "{}", a.lp_drift);
}

proptest! {
    #[test]
    fn bubble_is_positive_and_decreasing(eps in 0.01f64..3.0, t in 0.0f64..5.0, dt in 1e-3f64..1.0, r in 1usize..=3, extra in 1usize..4) {
        let dim = 2 * r + extra;
        let spec = BubbleSpec::pure(eps).unwrap();
        let a = bubble_eval(&spec, dim, r, t);
        let b = bubble_eval(&spec, dim, r, t + dt);
        prop_assert!(a > 0.0 && b > 0.0);
        prop_assert!(b < a);
    }
}
