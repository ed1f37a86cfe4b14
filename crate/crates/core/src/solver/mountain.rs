use std::sync::Arc;

use serde::Serialize;

use super::flow::{gradient_flow_with, FlowMode, FlowOutcome};
use super::newton::newton;
use super::{Provenance, Solution, SolverOptions};
use crate::discretization::Grid;
use crate::energy::{bump, endpoint_subquadratic, endpoint_supercubic, mp_level_upper, Endpoint, Functional, MpUpper, SmallSphere};
use crate::error::{Error, Result};
use crate::params::{Params, Regime};
use crate::real::{lit, to_f64, Real};
use crate::wells::Well;

/// The final path: the ray through the ridge point, sampled on `[0, t_end]`.
#[derive(Debug, Clone, Serialize)]
pub struct MpPath {
    /// Ray parameters, scaled so the ridge point sits at `t = 1`.
    pub t: Vec<f64>,
    pub energies: Vec<f64>,
    /// `I(t_end u) < 0`, so the ray can be joined to the endpoint inside `{I < 0}`.
    pub reaches_negative: bool,
}

#[derive(Debug, Clone)]
pub struct MpRun<T> {
    pub solution: Solution<T>,
    pub upper: MpUpper,
    pub endpoint: Endpoint<T>,
    pub sphere: SmallSphere,
    /// Max over the initial segment path.
    pub initial_level: f64,
    /// Path level when the deformation handed over to Newton.
    pub ridge_level: f64,
    /// Path level after every sweep, starting with the initial one.
    pub level_history: Vec<f64>,
    pub sweeps: usize,
    pub path: MpPath,
}

/// Mountain-pass critical point of `I_k` (Dirichlet potential unless `opts.boundary` says
/// otherwise) on `grid`.
pub fn mountain_pass<T: Real>(params: &Params<T>, well: &Well, grid: &Arc<Grid<T>>, opts: &SolverOptions) -> Result<Solution<T>> {
    let func = Functional::new(grid, well, params)?.with_boundary(opts.boundary);
    let sphere = SmallSphere::estimate(to_f64(params.p))?;
    Ok(mountain_pass_run(&func, &sphere, opts)?.solution)
}

/// Full mountain-pass run: endpoint construction, path deformation, Newton handover.
pub fn mountain_pass_run<T: Real>(func: &Functional<T>, sphere: &SmallSphere, opts: &SolverOptions) -> Result<MpRun<T>> {
    let endpoint = default_endpoint(func, sphere)?;
    mountain_pass_from(func, endpoint, sphere, opts)
}

/// The regime's standard endpoint: the `lambda`-free scaled bump for `p < 2`, the concentrated
/// bump for `p >= 3`.
pub fn default_endpoint<T: Real>(func: &Functional<T>, sphere: &SmallSphere) -> Result<Endpoint<T>> {
    let params = *func.params();
    match params.regime() {
        Regime::Subquadratic => endpoint_subquadratic(func.well(), func.grid(), params.p, sphere),
        Regime::Supercubic => match endpoint_supercubic(func.well(), func.grid(), &params, sphere) {
            Err(Error::Unresolved(why)) => amplitude_endpoint(func, sphere).map_err(|_| Error::Unresolved(why)),
            other => other,
        },
        Regime::Intermediate => Err(Error::Regime(format!("mountain pass is not set up for p = {} in [2, 3)", params.p))),
    }
}

/// `e = s w` for the unit bump `w`, `s` the first power of two with `I(e) < 0` and
/// `||e|| > rho`. Used when the grid cannot resolve the concentrated bumps.
fn amplitude_endpoint<T: Real>(func: &Functional<T>, sphere: &SmallSphere) -> Result<Endpoint<T>> {
    let w = bump(func.grid(), &func.well().inscribed_ball(), 1.0)?;
    let fib = func.fibering(&w)?;
    let mut s = 1.0_f64;
    for _ in 0..60 {
        let e = to_f64(fib.value(lit(s)));
        let norm = to_f64(fib.a.sqrt()) * s;
        if e < 0.0 && norm > sphere.rho {
            return Ok(Endpoint { field: w.scale(lit(s)), t0: s, norm, energy: e });
        }
        s *= 2.0;
    }
    Err(Error::NoConvergence { what: "amplitude endpoint doubling", iterations: 60, residual: f64::NAN })
}

/// Mountain pass along paths ending at a given `endpoint`.
///
/// Paths are rays joined to the endpoint, and the maximizer of a ray is the first peak of
/// `t -> I(t v)`. Each sweep moves the maximizer by an Armijo step along the Sobolev gradient
/// and re-maximizes along the new ray, so the level never increases.
pub fn mountain_pass_from<T: Real>(
    func: &Functional<T>,
    endpoint: Endpoint<T>,
    sphere: &SmallSphere,
    opts: &SolverOptions,
) -> Result<MpRun<T>> {
    if func.params().regime() == Regime::Intermediate {
        return Err(Error::Regime(format!("mountain pass is not set up for p = {} in [2, 3)", func.params().p)));
    }
    func.check(&endpoint.field)?;
    let upper = mp_level_upper(func, &endpoint.field)?;
    let e = func.clean(endpoint.field.values());
    let fib = func.fibering_values(&e)?;
    let Some(t0) = fib.first_peak() else {
        let top: Vec<T> = e.iter().map(|&x| x * lit(upper.t_star)).collect();
        return Err(collapse(func, &top, opts, "the endpoint ray has no interior maximum"));
    };
    let mut top = Ridge { u: e.iter().map(|&x| x * t0).collect(), energy: fib.value(t0), tau: T::one() };
    let initial_level = upper.level;
    let mut history = vec![to_f64(top.energy)];
    let mut handoff = opts.mp_handoff_tol;
    let mut level_tol = opts.mp_level_tol;
    let mut attempts = 0;
    let mut sweeps = 0;
    loop {
        if sweeps >= opts.mp_max_sweeps {
            return Err(Error::NoConvergence {
                what: "mountain-pass deformation",
                iterations: sweeps,
                residual: history.last().copied().unwrap_or(f64::NAN),
            });
        }
        sweeps += 1;
        let before = top.energy;
        let (dual, moved) = descend(func, &mut top)?;
        history.push(to_f64(top.energy));
        if to_f64(top.energy) <= 1e-9 * initial_level.abs().max(1.0) || to_f64(func.norm_values(&top.u)) < opts.zero_norm {
            return Err(collapse(func, &top.u, opts, "path level collapsed"));
        }
        let decrement = to_f64(before - top.energy);
        let settled = to_f64(dual) <= handoff || decrement < level_tol || !moved;
        if !settled {
            continue;
        }
        let res = newton(func, top.u.clone(), opts)?;
        if res.converged && to_f64(func.norm_values(&res.u)) >= opts.zero_norm {
            let sol = Solution::build(func, res.u, sweeps + res.steps, Provenance::MountainPass)?;
            if to_f64(sol.energy.total) > 0.0 {
                let path = ray_path(func, &top.u, opts.mp_samples)?;
                return Ok(MpRun {
                    solution: sol,
                    upper,
                    endpoint,
                    sphere: *sphere,
                    initial_level,
                    ridge_level: to_f64(top.energy),
                    level_history: history,
                    sweeps,
                    path,
                });
            }
        }
        attempts += 1;
        if attempts > 4 || !moved {
            return Err(Error::NoConvergence { what: "mountain-pass Newton handover", iterations: sweeps, residual: to_f64(res.dual) });
        }
        handoff /= 100.0;
        level_tol /= 100.0;
    }
}

struct Ridge<T> {
    u: Vec<T>,
    energy: T,
    tau: T,
}

/// One projected Armijo step. Returns the dual norm at the old point and whether it moved.
fn descend<T: Real>(func: &Functional<T>, s: &mut Ridge<T>) -> Result<(T, bool)> {
    let phi = func.phi_if_needed(&s.u)?;
    let g = func.gradient(&s.u, &phi);
    let (dir, dual) = func.sobolev_gradient(&g)?;
    if dual == T::zero() {
        return Ok((dual, false));
    }
    let d2 = dual * dual;
    let round = lit::<T>(100.0) * T::epsilon();
    let mut tau = s.tau;
    while tau > lit(1e-14) {
        let trial: Vec<T> = s.u.iter().zip(&dir).map(|(&a, &b)| a - tau * b).collect();
        let fib = func.fibering_values(&trial)?;
        if let Some(t) = fib.first_peak() {
            let e = fib.value(t);
            let sufficient = e <= s.energy - lit::<T>(1e-4) * tau * d2;
            let flat = (e - s.energy).abs() <= round * s.energy.abs() && e <= s.energy;
            if e.is_finite() && (sufficient || flat) {
                s.u = trial.iter().map(|&x| x * t).collect();
                s.energy = e;
                s.tau = (tau * lit(2.0)).min(lit(1024.0));
                return Ok((dual, true));
            }
        }
        tau /= lit(2.0);
    }
    s.tau = lit(1e-6);
    Ok((dual, false))
}

/// `samples` points of `t -> I(t u)` on `[0, t_end]`, with `t_end` the first power of two at
/// which the energy is negative (capped at `2^20`).
fn ray_path<T: Real>(func: &Functional<T>, u: &[T], samples: usize) -> Result<MpPath> {
    let fib = func.fibering_values(u)?;
    let mut t_end = 2.0_f64;
    while to_f64(fib.value(lit(t_end))) >= 0.0 && t_end < 1048576.0 {
        t_end *= 2.0;
    }
    let n = samples.max(3);
    let mut t: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
    t.push(1.0);
    t.sort_by(f64::total_cmp);
    t.dedup();
    let energies = t.iter().map(|&x| to_f64(fib.value(lit(x)))).collect();
    Ok(MpPath { t, energies, reaches_negative: to_f64(fib.value(lit(t_end))) < 0.0 })
}

fn collapse<T: Real>(func: &Functional<T>, top: &[T], opts: &SolverOptions, why: &str) -> Error {
    let detail = match gradient_flow_with(func, top.to_vec(), FlowMode::Unconstrained, opts) {
        Ok(FlowOutcome::Zero { iterations, norm, .. }) => {
            format!("{why}; flow from the maximizer reached norm {norm:.2e} after {iterations} steps")
        }
        Ok(FlowOutcome::Converged(s)) => format!(
            "{why}; flow from the maximizer stopped at a critical point with energy {:.6e}",
            to_f64(s.energy.total)
        ),
        Err(e) => format!("{why}; flow from the maximizer failed: {e}"),
    };
    Error::NoPass(detail)
}
