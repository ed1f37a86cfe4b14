use std::sync::Arc;

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spwell::discretization::integrate;
use spwell::energy::{
    endpoint_subquadratic, endpoint_supercubic, energy, mp_level_upper, residual, Functional, SmallSphere,
};
use spwell::solver::random_field;
use spwell::{Field, Grid, Params, Well};

fn radial(k: f64, n: usize) -> Arc<Grid> {
    Arc::new(Grid::radial(k, n).unwrap())
}

fn in_well(g: &Arc<Grid>) -> Field {
    Field::radial_fn(g.clone(), |r: f64| 2.0 * (1.0 - (r / 0.9).powi(2)).max(0.0).powi(2))
}

#[test]
fn zero_field() {
    let g = radial(4.0, 201);
    let z = Field::zeros(g);
    let p = Params::new(3.0, 1.0, 10.0).unwrap();
    let well = Well::centered_ball(1.0);
    let e = energy(&z, &p, &well).unwrap();
    assert_eq!((e.kinetic, e.hartree, e.potential_power, e.total), (0.0, 0.0, 0.0, 0.0));
    let r = residual(&z, &p, &well).unwrap();
    assert_eq!(r.nehari_gap, 0.0);
    assert!(r.field.values().iter().all(|&v| v == 0.0));
}

#[test]
fn lambda_zero_bump_in_omega0() {
    let g = radial(4.0, 801);
    let well = Well::centered_ball(1.0);
    let u = in_well(&g);
    let p = 3.0;
    let h1 = g.grad_pairing(u.values(), u.values()) + integrate(&u.map(|x| x * x)).unwrap();
    let pw = integrate(&u.map(|x: f64| x.abs().powf(p + 1.0))).unwrap();
    let expect = 0.5 * h1 - pw / (p + 1.0);
    for mu in [0.0, 10.0, 1e4] {
        let e = energy(&u, &Params::new(p, 0.0, mu).unwrap(), &well).unwrap();
        assert_relative_eq!(e.total, expect, max_relative = 1e-13);
        let r = residual(&u, &Params::new(p, 0.7, mu).unwrap(), &well).unwrap();
        let r0 = residual(&u, &Params::new(p, 0.7, 0.0).unwrap(), &well).unwrap();
        assert_eq!(r.field.values(), r0.field.values());
    }
}

#[test]
fn breakdown_invariants_and_lambda_monotonicity() {
    let g = radial(5.0, 501);
    let well = Well::centered_ball(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let u = random_field(&g, 2.0, &mut rng);
        let mut last = f64::NEG_INFINITY;
        for lam in [0.0, 0.1, 1.0, 5.0] {
            let e = energy(&u, &Params::new(1.5, lam, 20.0).unwrap(), &well).unwrap();
            assert!(e.hartree >= 0.0);
            let h1 = g.grad_pairing(u.values(), u.values()) + integrate(&u.map(|x| x * x)).unwrap();
            assert!(e.kinetic >= 0.5 * h1 * (1.0 - 1e-14));
            assert_relative_eq!(e.total, e.kinetic + e.hartree - e.potential_power, max_relative = 1e-14);
            assert!(e.total >= last);
            last = e.total;
        }
    }
}

#[test]
fn nehari_gap_is_consistent_with_the_parts() {
    let g = radial(5.0, 501);
    let well = Well::centered_ball(1.0);
    let p = Params::new(3.0, 0.5, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = random_field(&g, 2.0, &mut rng);
    let f = Functional::new(&g, &well, &p).unwrap();
    let e = f.energy(&u).unwrap();
    let r = f.residual(&u).unwrap();
    // gap = 2 kinetic + 4 hartree - (p+1) power
    let expect = 2.0 * e.kinetic + 4.0 * e.hartree - 4.0 * e.potential_power;
    assert_relative_eq!(r.nehari_gap, expect, max_relative = 1e-12);
}

/// Central difference of `I` along `v` against the residual pairing, at two step sizes.
fn derivative_errors(f: &Functional<f64>, u: &Field, v: &Field) -> (f64, f64, f64) {
    let r = f.residual(u).unwrap();
    let w = u.grid().weights();
    let pairing: f64 = (0..u.len()).map(|i| w[i] * r.field.values()[i] * v.values()[i]).sum();
    let fd = |eps: f64| {
        let a = f.energy(&u.add(&v.scale(eps)).unwrap()).unwrap().total;
        let b = f.energy(&u.sub(&v.scale(eps)).unwrap()).unwrap().total;
        (a - b) / (2.0 * eps)
    };
    ((fd(1e-3) - pairing).abs(), (fd(1e-4) - pairing).abs(), pairing.abs())
}

#[test]
fn gradient_consistency_is_second_order() {
    let g = radial(6.0, 601);
    let well = Well::centered_ball(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for pair in 0..20 {
        let p = if pair % 2 == 0 { 3.0 } else { 1.5 };
        let params = Params::new(p, rng.gen_range(0.0..2.0), rng.gen_range(0.0..100.0)).unwrap();
        let f = Functional::new(&g, &well, &params).unwrap();
        let u = random_field(&g, 2.0, &mut rng);
        let v = random_field(&g, 2.0, &mut rng).scale(if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
        let (e3, e4, scale) = derivative_errors(&f, &u, &v);
        let floor = 1e-9 * scale.max(1.0);
        assert!(e3 <= 1e-4 * scale.max(1.0), "pair {pair}: {e3}");
        // a tenfold smaller step shrinks the error about a hundredfold until roundoff takes over
        assert!(e4 <= e3 / 50.0 || e4 <= floor, "pair {pair}: {e3} -> {e4}");
    }
}

#[test]
fn small_sphere_lower_bound_on_random_fields() {
    let g = radial(8.0, 801);
    let well = Well::centered_ball(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for p in [1.5, 3.0] {
        let sphere = SmallSphere::estimate(p).unwrap();
        assert!(sphere.alpha > 0.0);
        assert_relative_eq!(sphere.lower_bound(sphere.rho), sphere.alpha, max_relative = 1e-12);
        for _ in 0..25 {
            let params = Params::new(p, rng.gen_range(0.0..1.0), rng.gen_range(0.0..100.0)).unwrap();
            let f = Functional::new(&g, &well, &params).unwrap();
            let u = random_field(&g, 3.0, &mut rng);
            let u = u.scale(sphere.rho / f.norm(&u).unwrap());
            let e = f.energy(&u).unwrap().total;
            assert!(e >= sphere.alpha, "p = {p}: I = {e} < alpha = {}", sphere.alpha);
        }
    }
}

#[test]
fn endpoints_and_level_upper() {
    let g = radial(6.0, 1201);
    let well = Well::centered_ball(1.0);
    let sub = SmallSphere::estimate(1.5).unwrap();
    let e = endpoint_subquadratic(&well, &g, 1.5, &sub).unwrap();
    assert!(e.energy < 0.0 && e.norm > sub.rho);
    let f0 = Functional::new(&g, &well, &Params::new(1.5, 0.0, 0.0).unwrap()).unwrap();
    assert!(f0.energy(&e.field).unwrap().total < 0.0);

    let sup = SmallSphere::estimate(3.0).unwrap();
    let base = Params::new(3.0, 1.0, 50.0).unwrap();
    let e = endpoint_supercubic(&well, &g, &base, &sup).unwrap();
    assert!(e.energy < 0.0 && e.norm > sup.rho);
    let mut last = f64::INFINITY;
    for lam in [0.0, 0.5, 1.0] {
        let f = Functional::new(&g, &well, &base.with_lambda(lam)).unwrap();
        let up = mp_level_upper(&f, &e.field).unwrap();
        assert!(up.level >= sup.alpha);
        if last.is_finite() {
            assert!(up.level >= last);
        }
        last = up.level;
    }
}
