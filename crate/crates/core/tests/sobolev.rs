use critsob::phi::{make_phi, PhiKind};
use critsob::solver::{solve, ProblemSpec};
use critsob::{eps_upper_bound, sobolev_constant_estimate, BoundaryCondition, GridKind, RadialGrid};
use std::f64::consts::PI;
use std::sync::Arc;

fn grid(dim: usize, n: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::new(dim, n, GridKind::Uniform).unwrap())
}

#[test]
fn level_values_decrease_under_refinement() {
    let s = sobolev_constant_estimate(3, 1, &[50, 100, 200]).unwrap();
    assert!(s.converged());
    assert!(s.levels.windows(2).all(|w| w[1].value < w[0].value), "{:?}", s.levels);
    assert!(s.estimate <= s.finest());
}

#[test]
fn first_order_estimate_matches_the_known_constant() {
    // Best constant for r = 1, N = 3: 3 (π/2)^{4/3}.
    let exact = 3.0 * (PI / 2.0).powf(4.0 / 3.0);
    let s = sobolev_constant_estimate(3, 1, &[50, 100, 200, 400]).unwrap();
    assert!((s.estimate - exact).abs() < 1e-2 * exact, "{} vs {exact}", s.estimate);
    assert!(s.lower() <= exact && exact <= s.upper());
}

#[test]
fn estimate_rejects_bad_arguments() {
    assert!(sobolev_constant_estimate(3, 0, &[50]).is_err());
    assert!(sobolev_constant_estimate(4, 2, &[50]).is_err());
    assert!(sobolev_constant_estimate(3, 1, &[]).is_err());
}

#[test]
fn level_order_does_not_matter() {
    let a = sobolev_constant_estimate(3, 1, &[100, 50]).unwrap();
    let b = sobolev_constant_estimate(3, 1, &[50, 100, 50]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn eps_bound_limits() {
    let sob = sobolev_constant_estimate(5, 2, &[50, 100, 200]).unwrap();
    let spec_at = |norm: f64| {
        let phi = make_phi(PhiKind::ConstantSignBump, norm, grid(5, 100), 2).unwrap();
        ProblemSpec::new(2, BoundaryCondition::Navier, phi).unwrap()
    };
    let small = spec_at(1e-6);
    let b = eps_upper_bound(&small.phi, &sob, &small).unwrap();
    assert!((b - sob.estimate).abs() < 1e-12 * sob.estimate);
    let mut prev = sob.estimate;
    for gap in [1e-2, 1e-4, 1e-6] {
        let near = spec_at(1.0 - gap);
        let b = eps_upper_bound(&near.phi, &sob, &near).unwrap();
        let expected = sob.estimate * (1.0 - (1.0 - gap).powf(10.0)).powf(0.2);
        assert!((b - expected).abs() < 1e-6 * expected, "{b} vs {expected}");
        assert!(b < prev);
        prev = b;
    }
    assert!(prev < 0.11 * sob.estimate);
    let one = spec_at(1.0);
    assert!(eps_upper_bound(&one.phi, &sob, &one).is_err());
    let other = sobolev_constant_estimate(3, 1, &[50]).unwrap();
    assert!(eps_upper_bound(&small.phi, &other, &small).is_err());
}

#[test]
fn navier_value_respects_eps_bound() {
    let sob = sobolev_constant_estimate(5, 2, &[50, 100, 200]).unwrap();
    let phi = make_phi(PhiKind::ConstantSignBump, 0.5, grid(5, 100), 2).unwrap();
    let spec = ProblemSpec::new(2, BoundaryCondition::Navier, phi).unwrap();
    let res = solve(&spec).unwrap();
    assert!(res.converged);
    let bound = eps_upper_bound(&spec.phi, &sob, &spec).unwrap();
    assert!(res.value <= bound * (1.0 + 0.02), "{} vs {bound}", res.value);
}
