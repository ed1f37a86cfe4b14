use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spwell::bounds::{check_pointwise, constants, ps_device};
use spwell::discretization::GridKind;
use spwell::energy::{Functional, SmallSphere};
use spwell::poisson::solve_ball;
use spwell::solver::{
    domain_approximation, ground_state, gradient_flow, mountain_pass, mountain_pass_run, random_field, refine_newton,
    Provenance, SolverOptions,
};
use spwell::{Grid, Params, Well};

fn supercubic() -> (Arc<Grid>, Well, Params) {
    (Arc::new(Grid::radial(6.0, 1024).unwrap()), Well::centered_ball(1.0), Params::new(3.0, 1.0, 50.0).unwrap())
}

#[test]
fn newton_fixed_point_and_handoff() {
    let (g, well, params) = supercubic();
    let loose = SolverOptions { tol: 1e-4, ..SolverOptions::default() };
    let rough = mountain_pass(&params, &well, &g, &loose).unwrap();
    assert!(rough.residual_norm <= 1e-4);
    let fine = refine_newton(&rough.u, &params, &well, &SolverOptions::default()).unwrap();
    assert!(fine.residual_norm <= 1e-10);
    assert!(fine.iterations <= 8, "{} steps", fine.iterations);
    assert_eq!(fine.provenance, Provenance::Newton);

    let again = refine_newton(&fine.u, &params, &well, &SolverOptions::default()).unwrap();
    assert_eq!(again.iterations, 0);
    assert_eq!(again.u.values(), fine.u.values());
}

#[test]
fn flow_from_perturbed_saddle_returns_to_it() {
    let (g, well, params) = supercubic();
    let opts = SolverOptions::default();
    let mp = mountain_pass(&params, &well, &g, &opts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise = random_field(&g, 2.0, &mut rng);
    let scale = 0.01 * mp.u.sup_norm() / noise.sup_norm();
    let u0 = mp.u.add(&noise.scale(scale)).unwrap();
    let out = gradient_flow(&u0, &params, &well, &opts).unwrap();
    let s = out.solution().expect("flow converged");
    assert!((s.energy.total - mp.energy.total).abs() <= 1e-4, "{} vs {}", s.energy.total, mp.energy.total);
    assert_eq!(s.provenance, Provenance::GradientFlow);
}

#[test]
fn mountain_pass_is_deterministic() {
    let (g, well, params) = supercubic();
    let a = mountain_pass(&params, &well, &g, &SolverOptions::default()).unwrap();
    let b = mountain_pass(&params, &well, &g, &SolverOptions::default()).unwrap();
    assert_eq!(a.u.values(), b.u.values());
    assert_eq!(a.energy.total.to_bits(), b.energy.total.to_bits());
}

fn subquadratic() -> (Arc<Grid>, Well, Params) {
    (Arc::new(Grid::radial(5.0, 801).unwrap()), Well::centered_ball(4.0), Params::new(1.5, 0.01, 100.0).unwrap())
}

#[test]
fn subquadratic_solution_satisfies_pointwise_bounds() {
    let (g, well, params) = subquadratic();
    let s = mountain_pass(&params, &well, &g, &SolverOptions::default()).unwrap();
    assert!(s.residual_norm <= 1e-10 && s.nehari_ok(1e-6));
    let big_c = constants(&params).big_c_max.unwrap();
    assert!(s.u.sup_norm() <= big_c);
    for c in check_pointwise(&s.u, &s.phi, &params).unwrap() {
        assert!(c.pass, "{c:?}");
    }
    assert!(ps_device(&s.u, &solve_ball(&s.u).unwrap(), &params).unwrap().pass);

    // one start is the mountain pass itself
    let gs = ground_state(&params, &well, &g, 1, 0, &SolverOptions::default()).unwrap();
    assert_eq!(gs.solution.u.values(), s.u.values());
    assert_eq!(gs.found.len(), 1);
}

#[test]
fn ground_state_search_is_minimal_and_seeded() {
    let (g, well, params) = subquadratic();
    let opts = SolverOptions::default();
    let a = ground_state(&params, &well, &g, 4, 9, &opts).unwrap();
    let b = ground_state(&params, &well, &g, 4, 9, &opts).unwrap();
    assert_eq!(a.solution.u.values(), b.solution.u.values());
    for f in &a.found {
        assert!(f.energy >= a.solution.energy.total);
    }
    assert!(a.checks.iter().filter(|c| !c.soft).all(|c| c.pass), "{:?}", a.checks);
}

#[test]
fn ground_state_rejects_wrong_regime() {
    let (g, well, _) = subquadratic();
    let opts = SolverOptions::default();
    assert!(ground_state(&Params::new(3.0, 1.0, 10.0).unwrap(), &well, &g, 2, 0, &opts).is_err());
    assert!(ground_state(&Params::new(1.5, 0.05, 10.0).unwrap(), &well, &g, 2, 0, &opts).is_err());
}

#[test]
fn domain_approximation_short_schedule() {
    let params = Params::new(3.0, 1.0, 50.0).unwrap();
    let well = Well::centered_ball(1.0);
    let d = domain_approximation(&params, &well, GridKind::Radial, &[4.0, 6.0, 8.0], 1.0 / 128.0, &SolverOptions::default())
        .unwrap();
    assert!(d.failure.is_none());
    assert_eq!(d.steps.len(), 3);
    assert!(d.differences_decreasing());
    assert!(d.steps.windows(2).all(|w| w[1].tail_mass < w[0].tail_mass));
    for s in &d.solutions {
        assert!(s.residual_norm <= 1e-10);
    }
    assert!(domain_approximation(&params, &well, GridKind::Radial, &[6.0, 4.0], 0.01, &SolverOptions::default()).is_err());
}

#[test]
fn mountain_pass_run_level_bracket() {
    let (g, well, params) = supercubic();
    let f = Functional::new(&g, &well, &params).unwrap();
    let sphere = SmallSphere::estimate(3.0).unwrap();
    let run = mountain_pass_run(&f, &sphere, &SolverOptions::default()).unwrap();
    let e = run.solution.energy.total;
    assert!(sphere.alpha <= e && e <= run.upper.level + 1e-9);
    assert!(run.level_history.windows(2).all(|w| w[1] <= w[0]));
    assert!((run.level_history[0] - run.initial_level).abs() <= 1e-12 * run.initial_level);
}
