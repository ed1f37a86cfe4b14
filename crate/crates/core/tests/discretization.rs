use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;
use spwell::discretization::{dump_field, dv_inner, extend, integrate, lq_norm, read_dump, GridKind};
use spwell::{Field, Grid};
use spwell::{Params, Well};

fn radial(k: f64, n: usize) -> Arc<Grid> {
    Arc::new(Grid::radial(k, n).unwrap())
}

fn bump(g: &Arc<Grid>, amp: f64, c: f64, width: f64) -> Field {
    Field::from_fn(g.clone(), |x, r| {
        let d = if g.kind() == GridKind::Radial { r - c } else { ((x[0] - c).powi(2) + x[1] * x[1] + x[2] * x[2]).sqrt() };
        amp * (-(d * d) / (width * width)).exp()
    })
    .with_dirichlet()
}

#[test]
fn constant_integrates_to_ball_volume() {
    let g = radial(1.0, 201);
    let v = integrate(&Field::from_fn(g.clone(), |_, _| 1.0)).unwrap();
    assert!((v / (4.0 * PI / 3.0) - 1.0).abs() < 5e-3);
    assert_eq!(integrate(&Field::zeros(g)).unwrap(), 0.0);
}

#[test]
fn gaussian_integral() {
    let g = radial(8.0, 2048);
    let v = integrate(&Field::radial_fn(g, |r| (-r * r).exp())).unwrap();
    assert_relative_eq!(v, PI.powf(1.5), max_relative = 1e-6);
}

#[test]
fn non_finite_values_are_rejected() {
    let g = radial(1.0, 11);
    let mut v = vec![0.0; 11];
    v[3] = f64::NAN;
    assert!(Field::new(g.clone(), v).is_err());
    assert!(Field::new(g, vec![0.0; 10]).is_err());
}

#[test]
fn grid_invariants() {
    let g = radial(3.0, 301);
    assert!(g.radius().windows(2).all(|w| w[1] > w[0]));
    assert_eq!(g.radius()[0], 0.0);
    assert_relative_eq!(*g.radius().last().unwrap(), 3.0, max_relative = 1e-15);
    assert!(g.weights().iter().all(|&w| w > 0.0));

    let b = Grid::box3d(2.0, 48).unwrap();
    assert_relative_eq!(b.h(), 4.0 / 47.0, max_relative = 1e-15);
    let sum: f64 = b.weights().iter().sum();
    assert!((sum / (4.0 * PI / 3.0 * 8.0) - 1.0).abs() < 0.02, "masked volume {sum}");
    for i in 0..b.len() {
        assert_eq!(b.is_free(i), b.weights()[i] > 0.0);
    }
}

#[test]
fn dv_inner_examples() {
    let g = radial(4.0, 401);
    let well = Well::centered_ball(1.0);
    let z = Field::zeros(g.clone());
    let p0 = Params::new(3.0, 1.0, 0.0).unwrap();
    assert_eq!(dv_inner(&z, &z, &well, &p0).unwrap(), 0.0);

    let u = bump(&g, 1.0, 0.0, 1.0);
    let h1 = g.grad_pairing(u.values(), u.values()) + integrate(&u.map(|x| x * x)).unwrap();
    assert_relative_eq!(dv_inner(&u, &u, &well, &p0).unwrap(), h1, max_relative = 1e-13);

    // supported inside Omega0: g vanishes there, so mu drops out
    let inside = Field::radial_fn(g.clone(), |r: f64| (1.0 - (r / 0.9).powi(2)).max(0.0).powi(2));
    let a = dv_inner(&inside, &inside, &well, &p0).unwrap();
    for mu in [1.0, 100.0, 1e6] {
        let b = dv_inner(&inside, &inside, &well, &p0.with_mu(mu)).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }
    let other = radial(4.0, 301);
    assert!(dv_inner(&u, &Field::zeros(other), &well, &p0).is_err());
}

#[test]
fn lq_norm_examples() {
    let g = radial(1.0, 201);
    let one = Field::from_fn(g.clone(), |_, _| 1.0);
    let n2 = lq_norm(&one, 2.0).unwrap();
    assert!((n2 / (4.0 * PI / 3.0).sqrt() - 1.0).abs() < 5e-3);
    assert!(lq_norm(&one, 0.5).is_err());

    let g = radial(4.0, 801);
    let charge = Field::radial_fn(g.clone(), |r: f64| if r <= 1.0 { 1.0 } else { 0.0 });
    let q = 12.0 / 5.0;
    let direct = integrate(&charge.map(|x: f64| x.abs().powf(q))).unwrap().powf(1.0 / q);
    assert_relative_eq!(lq_norm(&charge, q).unwrap(), direct, max_relative = 1e-14);
}

#[test]
fn discrete_integration_by_parts() {
    for g in [radial(5.0, 501), Arc::new(Grid::box3d(2.0, 25).unwrap())] {
        let u = bump(&g, 1.3, 0.4, 0.7);
        let v = bump(&g, 0.8, -0.2, 1.1);
        let lap = g.neg_laplacian(u.values());
        let lhs: f64 = lap.iter().zip(v.values()).zip(g.weights()).map(|((a, b), w)| a * b * w).sum();
        let rhs = g.grad_pairing(u.values(), v.values());
        let scale = u.l2_norm() * v.l2_norm();
        assert!((lhs - rhs).abs() <= 1e-10 * scale.max(rhs.abs()), "{lhs} vs {rhs}");
    }
}

#[test]
fn extend_examples() {
    let src = radial(4.0, 401);
    let dst = radial(8.0, 801);
    assert!(extend(&Field::zeros(src.clone()), &dst).unwrap().values().iter().all(|&v| v == 0.0));
    assert!(extend(&Field::zeros(dst.clone()), &src).is_err());

    let u = Field::radial_fn(src.clone(), |r: f64| (1.0 - (r / 2.0).powi(2)).max(0.0).powi(2));
    let e = extend(&u, &dst).unwrap();
    for i in 0..dst.len() {
        let r = dst.radius()[i];
        if r < 4.0 {
            assert!((e.values()[i] - u.values()[i]).abs() < 1e-14);
        } else {
            assert_eq!(e.values()[i], 0.0);
        }
    }

    // smooth field, finer target: norms survive interpolation
    let v = bump(&src, 2.0, 0.5, 0.8);
    let fine = radial(6.0, 1201);
    let ev = extend(&v, &fine).unwrap();
    assert_relative_eq!(ev.l2_norm(), v.l2_norm(), max_relative = 1e-3);
    let well = Well::centered_ball(1.0);
    let p = Params::new(3.0, 1.0, 5.0).unwrap();
    assert_relative_eq!(
        dv_inner(&ev, &ev, &well, &p).unwrap(),
        dv_inner(&v, &v, &well, &p).unwrap(),
        max_relative = 1e-3
    );

    let b = Arc::new(Grid::box3d(2.0, 21).unwrap());
    let bb = Arc::new(Grid::box3d(4.0, 41).unwrap());
    let w = bump(&b, 1.0, 0.0, 0.5);
    let ew = extend(&w, &bb).unwrap();
    assert_relative_eq!(ew.l2_norm(), w.l2_norm(), max_relative = 1e-3);
}

#[test]
fn dump_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = radial(2.0, 33);
    let u = bump(&g, 1.0, 0.0, 0.5);
    let (bin, side) = dump_field(&u, dir.path(), "u").unwrap();
    assert_eq!(std::fs::metadata(&bin).unwrap().len(), 33 * 8);
    let (head, vals) = read_dump(&bin, &side).unwrap();
    assert_eq!(head.kind, GridKind::Radial);
    assert_eq!(head.n, 33);
    assert_eq!(vals, u.values());
}

fn random_bump(g: &Arc<Grid>, a: (f64, f64, f64)) -> Field {
    bump(g, a.0, a.1, a.2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dv_inner_symmetric_positive(
        a in (0.1f64..3.0, 0.0f64..2.0, 0.2f64..1.5),
        b in (-3.0f64..3.0, 0.0f64..2.0, 0.2f64..1.5),
        mu in 0.0f64..100.0,
    ) {
        let g = radial(4.0, 201);
        let well = Well::centered_ball(1.0);
        let p = Params::new(3.0, 1.0, mu).unwrap();
        let u = random_bump(&g, a);
        let v = random_bump(&g, b);
        let uv = dv_inner(&u, &v, &well, &p).unwrap();
        let vu = dv_inner(&v, &u, &well, &p).unwrap();
        prop_assert!((uv - vu).abs() <= 1e-13 * uv.abs().max(1e-300));
        let uu = dv_inner(&u, &u, &well, &p).unwrap();
        let h1 = g.grad_pairing(u.values(), u.values()) + integrate(&u.map(|x| x * x)).unwrap();
        prop_assert!(uu > 0.0 && uu >= h1 * (1.0 - 1e-14));
    }

    #[test]
    fn lq_norm_is_homogeneous(a in (0.1f64..3.0, 0.0f64..2.0, 0.2f64..1.5), c in -10.0f64..10.0, q in 1.0f64..6.0) {
        let g = radial(4.0, 201);
        let u = random_bump(&g, a);
        let lhs = lq_norm(&u.scale(c), q).unwrap();
        prop_assert!((lhs - c.abs() * lq_norm(&u, q).unwrap()).abs() <= 1e-13 * lhs.max(1e-300));
    }
}
