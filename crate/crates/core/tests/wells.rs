use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use spwell::discretization::integrate;
use spwell::wells::{omega0_mask, well_value};
use spwell::{Ball, Grid, Omega0, Well};

fn union() -> Well {
    Well::default_nonradial()
}

#[test]
fn point_values() {
    let w = Well::centered_ball(1.0);
    assert_eq!(well_value(&w, [0.0; 3]), 0.0);
    assert!((well_value(&w, [1.0 + w.tau / 2.0, 0.0, 0.0]) - 0.5).abs() < 1e-15);
    assert_eq!(well_value(&w, [50.0, -20.0, 3.0]), 1.0);
}

#[test]
fn mask_volumes() {
    let g = Arc::new(Grid::radial(4.0, 2001).unwrap());
    let v = integrate(&omega0_mask(&Well::centered_ball(1.0), &g).unwrap()).unwrap();
    assert!((v / (4.0 * PI / 3.0) - 1.0).abs() < 0.02, "{v}");

    let b = Arc::new(Grid::box3d(2.0, 81).unwrap());
    let v = integrate(&omega0_mask(&union(), &b).unwrap()).unwrap();
    let exact = 2.0 * 4.0 * PI / 3.0 * 0.125;
    assert!((v / exact - 1.0).abs() < 0.02, "{v} vs {exact}");

    let ell = Well::new(Omega0::Ellipsoid { center: [0.0; 3], semi_axes: [1.0, 0.5, 0.5] }, 0.25).unwrap();
    let v = integrate(&omega0_mask(&ell, &b).unwrap()).unwrap();
    let exact = 4.0 * PI / 3.0 * 0.25;
    assert!((v / exact - 1.0).abs() < 0.02, "{v} vs {exact}");
}

#[test]
fn mask_requires_omega0_inside_the_ball() {
    let g = Arc::new(Grid::radial(1.0, 101).unwrap());
    assert!(omega0_mask(&Well::centered_ball(1.5), &g).is_err());
}

#[test]
fn potential_at_least_one() {
    let b = Grid::box3d(2.0, 21).unwrap();
    let v = union().potential(&b, 30.0).unwrap();
    assert!(v.iter().all(|&x| x >= 1.0));
}

fn wells() -> impl Strategy<Value = Well> {
    let ball = (-1.0f64..1.0, 0.1f64..1.0, 0.05f64..1.0)
        .prop_map(|(c, r, tau)| Well::new(Omega0::Ball { center: [c, 0.0, 0.0], radius: r }, tau).unwrap());
    let ell = (0.1f64..1.0, 0.1f64..1.0, 0.1f64..1.0, 0.05f64..1.0).prop_map(|(a, b, c, tau)| {
        Well::new(Omega0::Ellipsoid { center: [0.0; 3], semi_axes: [a, b, c] }, tau).unwrap()
    });
    let uni = (0.1f64..0.8, 0.1f64..0.5, 0.05f64..1.0).prop_map(|(d, r, tau)| {
        let balls = vec![Ball { center: [d, 0.0, 0.0], radius: r }, Ball { center: [-d, 0.1, 0.0], radius: r }];
        Well::new(Omega0::UnionOfBalls { balls }, tau).unwrap()
    });
    prop_oneof![ball, ell, uni]
}

proptest! {
    #[test]
    fn values_in_unit_interval_and_lipschitz(
        w in wells(),
        x in prop::array::uniform3(-3.0f64..3.0),
        d in prop::array::uniform3(-0.1f64..0.1),
    ) {
        let a = well_value(&w, x);
        prop_assert!((0.0..=1.0).contains(&a));
        let y = [x[0] + d[0], x[1] + d[1], x[2] + d[2]];
        let dist = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        prop_assert!((well_value(&w, y) - a).abs() <= dist / w.tau * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn g_vanishes_on_the_mask(w in wells()) {
        let g = Arc::new(Grid::box3d(2.5, 21).unwrap());
        let mask = omega0_mask(&w, &g).unwrap();
        let vals = w.sample(&g).unwrap();
        for (m, v) in mask.values().iter().zip(&vals) {
            if *m == 1.0 {
                prop_assert_eq!(*v, 0.0);
            }
            prop_assert!((0.0..=1.0).contains(v));
        }
    }
}
