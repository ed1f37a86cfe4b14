use super::{Provenance, Solution, SolverOptions};
use crate::discretization::{Field, GridKind};
use crate::energy::Functional;
use crate::error::{Error, Result};
use crate::linalg::{band::BandLu, gmres};
use crate::params::Params;
use crate::poisson::{self, PoissonBoundary};
use crate::real::{lit, to_f64, Real};
use crate::wells::Well;

const MAX_HALVINGS: usize = 12;
const GMRES_TOL: f64 = 1e-7;
const GMRES_RESTART: usize = 40;
const GMRES_MAX: usize = 600;

pub(crate) struct NewtonResult<T> {
    pub u: Vec<T>,
    pub steps: usize,
    pub dual: T,
    pub converged: bool,
}

/// Newton on `I'(u) = 0` from `seed` with the Dirichlet potential.
pub fn refine_newton<T: Real>(seed: &Field<T>, params: &Params<T>, well: &Well, opts: &SolverOptions) -> Result<Solution<T>> {
    let func = Functional::new(seed.grid(), well, params)?.with_boundary(opts.boundary);
    func.check(seed)?;
    let res = newton(&func, func.clean(seed.values()), opts)?;
    if !res.converged {
        return Err(Error::NoConvergence { what: "Newton", iterations: res.steps, residual: to_f64(res.dual) });
    }
    Solution::build(&func, res.u, res.steps, Provenance::Newton)
}

fn dual_of<T: Real>(func: &Functional<T>, u: &[T]) -> Result<(Vec<T>, Vec<T>, T)> {
    let phi = func.phi_if_needed(u)?;
    let g = func.gradient(u, &phi);
    let (_, d) = func.sobolev_gradient(&g)?;
    Ok((phi, g, d))
}

/// Damped Newton with backtracking on the dual residual. Returns the last iterate even when the
/// tolerance was not met.
pub(crate) fn newton<T: Real>(func: &Functional<T>, u0: Vec<T>, opts: &SolverOptions) -> Result<NewtonResult<T>> {
    let mut u = u0;
    let (mut phi, mut g, mut dual) = dual_of(func, &u)?;
    let tol = effective_tol::<T>(opts.tol, func.norm_values(&u));
    let eps: T = lit(opts.newton_eps);
    let mut steps = 0;
    while dual > tol && steps < opts.newton_max_iter {
        let delta = match func.grid().kind() {
            GridKind::Radial => radial_step(func, &u, &phi, &g, eps)?,
            GridKind::Box3d => box_step(func, &u, &phi, &g, eps)?,
        };
        let mut s = T::one();
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<T> = u.iter().zip(&delta).map(|(&a, &d)| a + s * d).collect();
            let trial = func.clean(&trial);
            let (tp, tg, td) = dual_of(func, &trial)?;
            if td.is_finite() && td < (T::one() - lit::<T>(1e-4) * s) * dual {
                accepted = Some((trial, tp, tg, td));
                break;
            }
            s /= lit(2.0);
        }
        steps += 1;
        match accepted {
            Some((nu, np, ng, nd)) => {
                u = nu;
                phi = np;
                g = ng;
                dual = nd;
            }
            None => break,
        }
    }
    Ok(NewtonResult { converged: dual <= tol, u, steps, dual })
}

/// `opts.tol`, raised to what the working precision can resolve.
fn effective_tol<T: Real>(tol: f64, norm: T) -> T {
    let floor = to_f64(T::epsilon()) * 1e3 * to_f64(norm).max(1.0);
    lit(tol.max(floor))
}

/// Solves `J delta = -g` exactly: `delta` and the potential perturbation `psi` are interleaved
/// into one banded system, which keeps the nonlocal Hartree term sparse.
fn radial_step<T: Real>(func: &Functional<T>, u: &[T], phi: &[T], g: &[T], eps: T) -> Result<Vec<T>> {
    let grid = func.grid();
    let n = grid.n();
    let w = grid.weights();
    let a = grid.radial_edges();
    let pot = func.potential();
    let lam = func.params().lambda;
    let two = lit::<T>(2.0);
    let mut m = BandLu::zeros(2 * n, 2, 2);
    let mut rhs = vec![T::zero(); 2 * n];
    for i in 0..n {
        let (di, pi) = (2 * i, 2 * i + 1);
        if grid.is_free(i) {
            let mut diag = w[i] * (pot[i] + lam * phi[i] - func.nonlinear_derivative(u[i], eps));
            if i > 0 {
                diag += a[i - 1];
                if grid.is_free(i - 1) {
                    m.add(di, di - 2, -a[i - 1]);
                }
            }
            if i + 1 < n {
                diag += a[i];
                if grid.is_free(i + 1) {
                    m.add(di, di + 2, -a[i]);
                }
            }
            m.add(di, di, diag);
            m.add(di, pi, lam * w[i] * u[i]);
            rhs[di] = -g[i];
        } else {
            m.add(di, di, T::one());
        }
    }
    match func.boundary() {
        PoissonBoundary::FreeSpace => {
            let (lower, diag, upper) = poisson::robin_matrix(grid);
            for i in 0..n {
                let pi = 2 * i + 1;
                m.add(pi, pi, diag[i]);
                if i > 0 {
                    m.add(pi, pi - 2, lower[i]);
                }
                if i + 1 < n {
                    m.add(pi, pi + 2, upper[i]);
                }
                m.add(pi, 2 * i, -two * w[i] * u[i]);
            }
        }
        PoissonBoundary::Dirichlet => {
            for i in 0..n {
                let pi = 2 * i + 1;
                if !grid.is_free(i) {
                    m.add(pi, pi, T::one());
                    continue;
                }
                let mut diag = T::zero();
                if i > 0 {
                    diag += a[i - 1];
                    if grid.is_free(i - 1) {
                        m.add(pi, pi - 2, -a[i - 1]);
                    }
                }
                if i + 1 < n {
                    diag += a[i];
                    if grid.is_free(i + 1) {
                        m.add(pi, pi + 2, -a[i]);
                    }
                }
                m.add(pi, pi, diag);
                m.add(pi, 2 * i, -two * w[i] * u[i]);
            }
        }
    }
    if !m.factor() {
        return Err(Error::Singular("radial Newton system"));
    }
    let x = m.solve(&rhs);
    Ok((0..n).map(|i| if grid.is_free(i) { x[2 * i] } else { T::zero() }).collect())
}

/// Inexact Newton step by flexible GMRES, preconditioned with the positive part of the
/// linearization.
fn box_step<T: Real>(func: &Functional<T>, u: &[T], phi: &[T], g: &[T], eps: T) -> Result<Vec<T>> {
    let grid = func.grid();
    let lam = func.params().lambda;
    let shift: Vec<T> = func.potential().iter().zip(phi).map(|(&v, &f)| v + lam * f.max(T::zero())).collect();
    let b: Vec<T> = g.iter().map(|&x| -x).collect();
    let failed = std::cell::Cell::new(None);
    let apply = |x: &[T], y: &mut [T]| match func.jacobian_apply_with(u, phi, x, eps) {
        Ok(v) => y.copy_from_slice(&v),
        Err(e) => {
            failed.set(Some(e));
            y.iter_mut().for_each(|v| *v = T::zero());
        }
    };
    let precond = |r: &[T]| match grid.solve_shifted(&shift, r, lit(1e-4)) {
        Ok((x, _)) => x,
        Err(_) => r.to_vec(),
    };
    let out = gmres::fgmres(apply, precond, &b, lit(GMRES_TOL), GMRES_RESTART, GMRES_MAX);
    if let Some(e) = failed.take() {
        return Err(e);
    }
    Ok(func.clean(&out.x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::discretization::Grid;

    #[test]
    fn radial_step_solves_the_linearization() {
        for boundary in [PoissonBoundary::Dirichlet, PoissonBoundary::FreeSpace] {
            let g = Arc::new(Grid::radial(4.0, 201).unwrap());
            let f = Functional::new(&g, &Well::centered_ball(1.0), &Params::new(3.0, 0.8, 10.0).unwrap())
                .unwrap()
                .with_boundary(boundary);
            let u = f.clean(Field::radial_fn(g.clone(), |r: f64| 2.0 * (-r * r).exp()).values());
            let phi = f.phi(&u).unwrap();
            let grad = f.gradient(&u, &phi);
            let delta = radial_step(&f, &u, &phi, &grad, 0.0).unwrap();
            let jd = f.jacobian_apply_with(&u, &phi, &delta, 0.0).unwrap();
            let err = (0..jd.len()).map(|i| (jd[i] + grad[i]).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10 * crate::real::max_abs(&grad), "{boundary:?}: {err}");
        }
    }

    #[test]
    fn box_step_matches_radial_direction() {
        let g = Arc::new(Grid::box3d(3.0, 17).unwrap());
        let f = Functional::new(&g, &Well::centered_ball(1.0), &Params::new(3.0, 0.5, 5.0).unwrap()).unwrap();
        let u = f.clean(Field::radial_fn(g.clone(), |r: f64| (-r * r).exp()).values());
        let phi = f.phi(&u).unwrap();
        let grad = f.gradient(&u, &phi);
        let delta = box_step(&f, &u, &phi, &grad, 0.0).unwrap();
        let jd = f.jacobian_apply_with(&u, &phi, &delta, 0.0).unwrap();
        let r: f64 = (0..jd.len()).map(|i| (jd[i] + grad[i]).powi(2)).sum::<f64>().sqrt();
        let b: f64 = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(r <= 1e-6 * b);
    }
}
