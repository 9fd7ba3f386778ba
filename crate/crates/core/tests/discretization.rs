use critsob::bc::DiscreteSpace;
use critsob::grid::ball_volume;
use critsob::laplacian::iterated_negative_laplacian;
use critsob::stencil::StencilOrder;
use critsob::{
    enforce_bc, hr_seminorm_sq, iterated_laplacian, lp_norm, make_radial_grid, radial_laplacian, BoundaryCondition,
    GridKind, Profile, RadialGrid, Seminorm,
};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn uniform(dim: usize, n: usize) -> Arc<RadialGrid> {
    Arc::new(make_radial_grid(dim, n, GridKind::Uniform).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Nodes below `cut` where second-order stencils are checked.
fn interior(g: &RadialGrid, cut: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
    g.nodes().iter().copied().enumerate().filter(move |&(_, t)| t < cut)
}

#[test]
fn ball_volume_and_second_moment() {
    let g = uniform(3, 400);
    let ones = vec![1.0; g.len()];
    assert!(rel(g.integrate(&ones), 4.0 * PI / 3.0) < 1e-6);
    let sq: Vec<f64> = g.nodes().iter().map(|t| t * t).collect();
    assert!(rel(g.integrate(&sq), 4.0 * PI / 5.0) < 1e-6);
}

#[test]
fn graded_grid_is_increasing_and_ends_at_one() {
    let g = make_radial_grid(5, 200, GridKind::Graded { beta: 2.0 }).unwrap();
    assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*g.nodes().last().unwrap(), 1.0);
    assert!(g.nodes()[0] > 0.0);
    assert!(g.weights().iter().all(|&w| w > 0.0));
}

#[test]
fn grid_constructor_rejects_bad_input() {
    assert!(make_radial_grid(3, 7, GridKind::Uniform).is_err());
    assert!(make_radial_grid(0, 100, GridKind::Uniform).is_err());
}

#[test]
fn laplacian_of_quadratic_and_quartic() {
    let g = uniform(4, 400);
    let u = Profile::from_fn(g.clone(), |t| t * t).unwrap();
    let lu = radial_laplacian(&u);
    for (k, _) in interior(&g, 0.99) {
        assert!((lu.values()[k] - 8.0).abs() < 1e-8);
    }

    let g = uniform(3, 400);
    let u = Profile::from_fn(g.clone(), |t| t.powi(4)).unwrap();
    let lu = radial_laplacian(&u);
    let h = 1.0 / 399.5;
    for (k, t) in interior(&g, 0.99) {
        // Second-order stencil: error bounded by a multiple of h^2.
        assert!((lu.values()[k] - 20.0 * t * t).abs() < 50.0 * h * h, "rho = {t}");
    }
}

#[test]
fn laplacian_of_constant_is_zero() {
    let g = uniform(6, 100);
    let u = Profile::from_fn(g, |_| 1.0).unwrap();
    assert!(radial_laplacian(&u).max_abs() < 1e-9);
}

#[test]
fn iterated_laplacian_order_zero_and_one() {
    let g = uniform(4, 200);
    let u = Profile::from_fn(g.clone(), |t| 1.0 - t * t).unwrap();
    let id = iterated_laplacian(&u, 0, BoundaryCondition::Dirichlet, 1).unwrap();
    assert_eq!(id.values(), u.values());

    let v = Profile::from_fn(g.clone(), |t| t * t).unwrap();
    let raw = iterated_negative_laplacian(g.nodes(), v.values(), 4, 1, StencilOrder::Second);
    for (k, _) in interior(&g, 0.99) {
        assert!((raw[k] + 8.0).abs() < 1e-8);
    }
    assert!(iterated_laplacian(&u, 2, BoundaryCondition::Navier, 1).is_err());
}

#[test]
fn iterated_laplacian_matches_bubble_closed_form() {
    use critsob::bubble::{bubble_eval, bubble_polyharmonic, BubbleSpec};
    let (dim, r, eps) = (6, 2, 0.5);
    let g = uniform(dim, 400);
    let spec = BubbleSpec::pure(eps).unwrap();
    let u: Vec<f64> = g.nodes().iter().map(|&t| bubble_eval(&spec, dim, r, t)).collect();
    let fd = iterated_negative_laplacian(g.nodes(), &u, dim, 2, StencilOrder::Fourth);
    for (k, t) in interior(&g, 0.8).filter(|&(_, t)| t > 0.05) {
        let exact = bubble_polyharmonic(&spec, dim, r, 2, t).unwrap();
        assert!(rel(fd[k], exact) < 1e-5, "rho = {t}: {} vs {exact}", fd[k]);
    }
}

#[test]
fn lp_norm_examples() {
    let g = uniform(3, 400);
    for p in [1.0, 2.0, 6.0] {
        let c = Profile::from_fn(g.clone(), |_| -2.5).unwrap();
        assert!(rel(lp_norm(&c, p).unwrap(), 2.5 * ball_volume(3).powf(1.0 / p)) < 1e-12);
    }
    assert_eq!(lp_norm(&Profile::zeros(g.clone()), 3.0).unwrap(), 0.0);
    // 4 pi int_0^1 (1 - r^2)^2 r^2 dr = 32 pi / 105.
    let u = Profile::from_fn(g.clone(), |t| 1.0 - t * t).unwrap();
    assert!(rel(lp_norm(&u, 2.0).unwrap(), (32.0 * PI / 105.0).sqrt()) < 1e-5);
    assert!(lp_norm(&u, 0.5).is_err());
}

#[test]
fn seminorm_examples() {
    let g = uniform(3, 400);
    assert_eq!(hr_seminorm_sq(&Profile::zeros(g.clone()), 1, BoundaryCondition::Dirichlet).unwrap(), 0.0);
    // int |2 rho|^2 dx over the 3-ball = 16 pi / 5.
    let u = Profile::from_fn(g, |t| 1.0 - t * t).unwrap();
    let e = hr_seminorm_sq(&u, 1, BoundaryCondition::Dirichlet).unwrap();
    assert!(rel(e, 16.0 * PI / 5.0) < 1e-4, "{e}");

    // N = 5: Δ(1 - ρ²)² = 28ρ² - 20, and ω₄ ∫ (28ρ² - 20)² ρ⁴ dρ = 512 π² / 27.
    let g = uniform(5, 400);
    let u = Profile::from_fn(g, |t| (1.0 - t * t).powi(2)).unwrap();
    let e = hr_seminorm_sq(&u, 2, BoundaryCondition::Navier).unwrap();
    assert!(rel(e, 512.0 * PI * PI / 27.0) < 1e-4, "{e}");
}

#[test]
fn enforce_bc_examples() {
    let g = uniform(5, 120);
    let compliant = Profile::from_fn(g.clone(), |t| (1.0 - t * t).powi(3)).unwrap();
    let once = enforce_bc(&compliant, 2, BoundaryCondition::Dirichlet).unwrap();
    let twice = enforce_bc(&once, 2, BoundaryCondition::Dirichlet).unwrap();
    assert_eq!(once.values(), twice.values());

    let ones = Profile::from_fn(g.clone(), |_| 1.0).unwrap();
    let e = enforce_bc(&ones, 1, BoundaryCondition::Dirichlet).unwrap();
    assert_eq!(*e.values().last().unwrap(), 0.0);

    let wavy = Profile::from_fn(g.clone(), |t| (3.0 * t).sin() + 0.3 * (11.0 * t).cos()).unwrap();
    let nav = enforce_bc(&wavy, 2, BoundaryCondition::Navier).unwrap();
    assert!(nav.values().last().unwrap().abs() < 1e-8);

    // r = 3 carries two essential Navier conditions: u(1) = 0 and Δu(1) = 0.
    let nav3 = enforce_bc(&wavy, 3, BoundaryCondition::Navier).unwrap();
    let lap = radial_laplacian(&nav3);
    assert!(nav3.values().last().unwrap().abs() < 1e-8);
    let scale = lap.max_abs();
    assert!(lap.values().last().unwrap().abs() < 1e-8 * scale);
}

#[test]
fn seminorm_converges_at_second_order() {
    let bump = |t: f64| {
        let s = t / 0.8;
        if s >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    };
    let vals: Vec<f64> = [100, 200, 400, 800]
        .iter()
        .map(|&n| hr_seminorm_sq(&Profile::from_fn(uniform(5, n), bump).unwrap(), 2, BoundaryCondition::Dirichlet).unwrap())
        .collect();
    let rate = ((vals[1] - vals[2]) / (vals[2] - vals[3])).abs().log2();
    assert!((rate - 2.0).abs() < 0.5, "rate {rate}, values {vals:?}");
}

fn free_vector(space: &DiscreteSpace, seed: &[f64]) -> Vec<f64> {
    let c: Vec<f64> = (0..space.free_dim()).map(|k| seed[k % seed.len()] * (1.0 + k as f64).sin()).collect();
    space.embed(&c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn even_order_inner_product_is_symmetric(a in prop::collection::vec(-1.0f64..1.0, 4), b in prop::collection::vec(-1.0f64..1.0, 4)) {
        let g = uniform(5, 60);
        let space = DiscreteSpace::new(g.clone(), 2, BoundaryCondition::Dirichlet).unwrap();
        let (u, v) = (free_vector(&space, &a), free_vector(&space, &b));
        let semi = Seminorm::from_grid(&g, 2);
        let (uv, vu) = (semi.inner(&u, &v), semi.inner(&v, &u));
        let scale = semi.energy(&u).sqrt() * semi.energy(&v).sqrt();
        prop_assert!((uv - vu).abs() <= 1e-10 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn seminorm_is_positive_on_the_dirichlet_space(a in prop::collection::vec(-1.0f64..1.0, 5), r in 1usize..=3) {
        let dim = 2 * r + 1;
        let g = uniform(dim, 50);
        let space = DiscreteSpace::new(g.clone(), r, BoundaryCondition::Dirichlet).unwrap();
        let u = free_vector(&space, &a);
        let norm: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let e = hr_seminorm_sq(&Profile::new(g, u).unwrap(), r, BoundaryCondition::Dirichlet).unwrap();
        prop_assert!(e > 0.0);
    }

    #[test]
    fn iterates_compose(j1 in 0usize..3, j2 in 0usize..3, k in 1.0f64..5.0) {
        let g = uniform(7, 80);
        let u: Vec<f64> = g.nodes().iter().map(|t| (k * t).cos()).collect();
        let whole = iterated_negative_laplacian(g.nodes(), &u, 7, j1 + j2, StencilOrder::Second);
        let first = iterated_negative_laplacian(g.nodes(), &u, 7, j1, StencilOrder::Second);
        let split = iterated_negative_laplacian(g.nodes(), &first, 7, j2, StencilOrder::Second);
        for (a, b) in whole.iter().zip(&split) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn lp_norm_is_homogeneous(c in -1e3f64..1e3, p in 1.0f64..8.0, k in 0.5f64..4.0) {
        let g = uniform(3, 60);
        let u = Profile::from_fn(g, |t| (k * t).sin() + 0.2).unwrap();
        let base = lp_norm(&u, p).unwrap();
        let scaled = lp_norm(&u.scaled(c), p).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-13 * (c.abs() * base).max(f64::MIN_POSITIVE));
    }
}
