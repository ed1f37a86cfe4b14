use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spwell::poisson::{
    estimate_s0, potential_bounds, sharp_s0, sobolev_quotient, solve_ball, solve_free, solve_potential, PoissonBoundary,
};
use spwell::solver::random_field;
use spwell::{Field, Grid};

fn radial(k: f64, n: usize) -> Arc<Grid> {
    Arc::new(Grid::radial(k, n).unwrap())
}

fn ball_charge(g: &Arc<Grid>) -> Field {
    Field::radial_fn(g.clone(), |r: f64| if r <= 1.0 { 1.0 } else { 0.0 })
}

/// Newtonian potential of the unit-ball charge of density one.
fn ball_exact(r: f64) -> f64 {
    if r <= 1.0 {
        0.5 - r * r / 6.0
    } else {
        1.0 / (3.0 * r)
    }
}

fn at(g: &Grid, phi: &Field, r: f64) -> f64 {
    let i = (r / g.h()).round() as usize;
    phi.values()[i]
}

#[test]
fn zero_charge() {
    let g = radial(4.0, 101);
    for s in [solve_ball(&Field::zeros(g.clone())).unwrap(), solve_free(&Field::zeros(g.clone())).unwrap()] {
        assert!(s.phi.values().iter().all(|&v| v == 0.0));
    }
    let s = potential_bounds(&Field::zeros(g.clone()), &solve_ball(&Field::zeros(g)).unwrap(), sharp_s0()).unwrap();
    assert!(s.iter().all(|c| c.pass));
}

#[test]
fn uniform_ball_free_space() {
    let g = radial(4.0, 1024);
    let u = ball_charge(&g);
    for s in [solve_potential(&u, PoissonBoundary::FreeSpace).unwrap(), solve_free(&u).unwrap()] {
        assert!((at(&g, &s.phi, 0.0) / 0.5 - 1.0).abs() < 5e-3);
        assert!((at(&g, &s.phi, 1.0) / (1.0 / 3.0) - 1.0).abs() < 5e-3);
        for r in [1.5, 2.0, 3.0, 4.0] {
            assert!((at(&g, &s.phi, r) / ball_exact(r) - 1.0).abs() < 5e-3, "r = {r}");
        }
    }
}

#[test]
fn uniform_ball_dirichlet_is_shifted_free_space() {
    let k = 4.0;
    let g = radial(k, 1024);
    let s = solve_ball(&ball_charge(&g)).unwrap();
    for r in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let exact = ball_exact(r) - 1.0 / (3.0 * k);
        assert!((at(&g, &s.phi, r) - exact).abs() < 5e-3 * ball_exact(r), "r = {r}");
    }
    assert!(s.residual <= 1e-10);
}

#[test]
fn energy_identity() {
    let g = radial(6.0, 801);
    let u = Field::radial_fn(g.clone(), |r: f64| 1.5 * (-r * r).exp() + 0.3 * (-(r - 2.0).powi(2)).exp());
    for b in [PoissonBoundary::Dirichlet, PoissonBoundary::FreeSpace] {
        let s = solve_potential(&u.clone().with_dirichlet(), b).unwrap();
        assert_relative_eq!(s.grad_energy, s.coupling, max_relative = 1e-8);
    }
    let bx = Arc::new(Grid::box3d(3.0, 33).unwrap());
    let ub = Field::from_fn(bx.clone(), |x, _| (-(x[0] - 0.3).powi(2) - x[1] * x[1] - 2.0 * x[2] * x[2]).exp()).with_dirichlet();
    let s = solve_ball(&ub).unwrap();
    assert_relative_eq!(s.grad_energy, s.coupling, max_relative = 1e-8);
    assert!(s.residual <= 1e-10);
}

#[test]
fn gaussian_far_field() {
    // charge e^{-r^2}: 4 pi r phi(r) = pi^{3/2} erf(r)
    let g = radial(8.0, 2048);
    let u = Field::radial_fn(g.clone(), |r: f64| (-r * r / 2.0).exp());
    let s = solve_free(&u).unwrap();
    let k = 8.0;
    let far = 4.0 * PI * k * s.phi.values().last().unwrap();
    assert_relative_eq!(far, PI.powf(1.5), max_relative = 1e-4);
    let robin = solve_potential(&u, PoissonBoundary::FreeSpace).unwrap();
    let diff = s.phi.sub(&robin.phi).unwrap().sup_norm();
    assert!(diff < 1e-4 * s.phi.sup_norm(), "{diff}");
}

#[test]
fn box_ball_charge_matches_radial() {
    let bx = Arc::new(Grid::box3d(3.0, 49).unwrap());
    let u = Field::from_fn(bx.clone(), |_, r| if r <= 1.0 { 1.0 } else { 0.0 }).with_dirichlet();
    let s = solve_ball(&u).unwrap();
    let center = s.phi.sup_norm();
    // staircase charge: a few percent is the resolution limit at h = 1/8
    assert!((center / (0.5 - 1.0 / 9.0) - 1.0).abs() < 0.06, "{center}");
    assert!(s.phi.values().iter().all(|&v| v >= 0.0));
}

#[test]
fn ball_to_free_convergence() {
    let h = 1.0 / 128.0;
    let mut errs = Vec::new();
    for k in [4.0, 8.0, 16.0] {
        let g = radial(k, (k / h) as usize + 1);
        let u = Field::radial_fn(g.clone(), |r: f64| (1.0 - (r / 2.0).powi(2)).max(0.0));
        let ball = solve_ball(&u).unwrap();
        let free = solve_free(&u).unwrap();
        errs.push((k, ball.phi.sub(&free.phi).unwrap().sup_norm()));
    }
    for w in errs.windows(2) {
        assert!(w[1].1 < w[0].1);
    }
    let c = errs[0].1 * errs[0].0;
    for &(k, e) in &errs {
        assert!(e <= 1.01 * c / k, "k = {k}: {e}");
    }
}

#[test]
fn comparison_principle_on_nested_bumps() {
    let g = radial(5.0, 501);
    let small = Field::radial_fn(g.clone(), |r: f64| 0.7 * (-r * r).exp()).with_dirichlet();
    let large = Field::radial_fn(g.clone(), |r: f64| (-r * r / 2.0).exp()).with_dirichlet();
    let a = solve_ball(&small).unwrap();
    let b = solve_ball(&large).unwrap();
    for (x, y) in a.phi.values().iter().zip(b.phi.values()) {
        assert!(x <= y);
    }
}

#[test]
fn sobolev_estimate() {
    let a = estimate_s0(&radial(200.0, 20001)).unwrap();
    let b = estimate_s0(&radial(200.0, 40001)).unwrap();
    assert!((a / b - 1.0).abs() < 5e-3, "{a} {b}");
    assert!(a >= sharp_s0() && a < 1.1 * sharp_s0());

    // dilation invariance of the quotient
    let g = radial(40.0, 8001);
    let prof = |s: f64| {
        let edge = (1.0 + (40.0 / s).powi(2)).sqrt().recip();
        Field::radial_fn(g.clone(), move |r: f64| (1.0 + (r / s).powi(2)).sqrt().recip() - edge).with_dirichlet()
    };
    let q1 = sobolev_quotient(&prof(0.5)).unwrap();
    let q2 = sobolev_quotient(&prof(0.25)).unwrap();
    assert!((q1 / q2 - 1.0).abs() < 2e-2, "{q1} {q2}");
}

#[test]
fn potential_bounds_on_ball_charge_and_random_bumps() {
    let g = radial(8.0, 1024);
    let s0 = estimate_s0(&radial(200.0, 20001)).unwrap();
    let u = ball_charge(&g);
    let checks = potential_bounds(&u, &solve_ball(&u).unwrap(), s0).unwrap();
    assert!(checks.iter().all(|c| c.pass && c.margin > 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let u = random_field(&g, 2.0, &mut rng);
        for b in [PoissonBoundary::Dirichlet, PoissonBoundary::FreeSpace] {
            let sol = solve_potential(&u, b).unwrap();
            assert!(sol.phi.values().iter().all(|&v| v >= 0.0));
            let c = potential_bounds(&u, &sol, s0).unwrap();
            assert!(c.iter().all(|c| c.pass), "{c:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn potential_is_nonnegative(seed in any::<u64>(), signed in any::<bool>()) {
        let g = radial(6.0, 401);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = random_field(&g, 3.0, &mut rng);
        if signed {
            u = u.scale(-1.0);
        }
        let s = solve_ball(&u).unwrap();
        prop_assert!(s.phi.values().iter().all(|&v| v >= 0.0));
        prop_assert!((s.grad_energy - s.coupling).abs() <= 1e-8 * s.grad_energy);
    }
}
