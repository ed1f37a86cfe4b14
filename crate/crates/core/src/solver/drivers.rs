use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::mountain::{default_endpoint, mountain_pass, mountain_pass_from, mountain_pass_run, MpRun};
use super::newton::newton;
use super::{Provenance, Solution, SolutionSummary, SolverOptions};
use crate::bounds::{limit_problem_residual, tail_mass};
use crate::discretization::{extend, Grid, GridKind};
use crate::energy::{Functional, SmallSphere};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::poisson::PoissonBoundary;
use crate::real::{lit, to_f64, Real};
use crate::wells::Well;

/// Newton from `seed` on `func`, falling back to a fresh mountain pass when Newton stalls.
fn continue_from<T: Real>(func: &Functional<T>, seed: Vec<T>, sphere: &SmallSphere, opts: &SolverOptions) -> Result<Solution<T>> {
    let res = newton(func, seed, opts)?;
    if res.converged && to_f64(func.norm_values(&res.u)) >= opts.zero_norm {
        return Solution::build(func, res.u, res.steps, Provenance::Continuation);
    }
    Ok(mountain_pass_run(func, sphere, opts)?.solution)
}

fn grid_for<T: Real>(kind: GridKind, k: f64, h: f64) -> Result<Arc<Grid<T>>> {
    let n = (k / h).round() as usize + 1;
    Ok(Arc::new(match kind {
        GridKind::Radial => Grid::radial(lit(k), n)?,
        GridKind::Box3d => Grid::box3d(lit(k), 2 * n - 1)?,
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainStep {
    pub k: f64,
    pub summary: SolutionSummary,
    /// `||u_k - ext(u_{k_prev})||` in the `D_V` norm of `B_k`.
    pub cauchy_diff: Option<f64>,
    /// Tail integral beyond `k/2`.
    pub tail_mass: f64,
    /// `tail_mass * k/2`.
    pub tail_product: f64,
    /// `I_k(u_k) + lambda Q^2 / (16 pi k)` with `Q = int u^2`: removes the leading `1/k` shift
    /// the Dirichlet potential puts on the energy.
    pub monopole_corrected_energy: f64,
}

#[derive(Debug, Clone)]
pub struct DomainApproximation<T> {
    pub steps: Vec<DomainStep>,
    pub solutions: Vec<Solution<T>>,
    /// Set when the schedule stopped early.
    pub failure: Option<String>,
}

impl<T> DomainApproximation<T> {
    /// Successive Cauchy differences shrink.
    pub fn differences_decreasing(&self) -> bool {
        let d: Vec<f64> = self.steps.iter().filter_map(|s| s.cauchy_diff).collect();
        d.windows(2).all(|w| w[1] < w[0])
    }
}

/// Solves on `B_k` for each `k` of the increasing schedule at fixed spacing `h`. The first
/// radius runs the mountain pass, later ones start Newton from the zero extension of the
/// previous solution. A failure stops the loop and keeps the finished steps.
pub fn domain_approximation<T: Real>(
    params: &Params<T>,
    well: &Well,
    kind: GridKind,
    k_schedule: &[f64],
    h: f64,
    opts: &SolverOptions,
) -> Result<DomainApproximation<T>> {
    if k_schedule.is_empty() || k_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("k schedule must be nonempty and increasing".into()));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("spacing h = {h} must be positive")));
    }
    let sphere = SmallSphere::estimate(to_f64(params.p))?;
    let mut out = DomainApproximation { steps: Vec::new(), solutions: Vec::new(), failure: None };
    for &k in k_schedule {
        let step = (|| -> Result<(Solution<T>, DomainStep)> {
            let grid = grid_for::<T>(kind, k, h)?;
            let func = Functional::new(&grid, well, params)?.with_boundary(opts.boundary);
            let (sol, diff) = match out.solutions.last() {
                None => (mountain_pass_run(&func, &sphere, opts)?.solution, None),
                Some(prev) => {
                    let seed = extend(&prev.u, &grid)?;
                    let sol = continue_from(&func, seed.values().to_vec(), &sphere, opts)?;
                    let d = sol.u.sub(&seed)?;
                    (sol, Some(to_f64(func.norm_values(d.values()))))
                }
            };
            let half: T = lit(k / 2.0);
            let tail = to_f64(tail_mass(&sol.u, half)?);
            let q = to_f64(sol.u.l2_norm()).powi(2);
            let shift = match opts.boundary {
                PoissonBoundary::Dirichlet => to_f64(params.lambda) * q * q / (16.0 * std::f64::consts::PI * k),
                PoissonBoundary::FreeSpace => 0.0,
            };
            let summary = sol.summary();
            let step = DomainStep {
                k,
                cauchy_diff: diff,
                tail_mass: tail,
                tail_product: tail * k / 2.0,
                monopole_corrected_energy: summary.energy + shift,
                summary,
            };
            Ok((sol, step))
        })();
        match step {
            Ok((sol, st)) => {
                out.solutions.push(sol);
                out.steps.push(st);
            }
            Err(e) => {
                out.failure = Some(format!("k = {k}: {e}"));
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Continuation<T> {
    pub lambdas: Vec<f64>,
    pub solutions: Vec<Solution<T>>,
    /// Direct `lambda = 0` mountain pass.
    pub limit: Solution<T>,
    /// `||u_lambda - u_0|| / ||u_0||` in the `D_V` norm.
    pub relative_gaps: Vec<f64>,
}

/// Follows the branch from the first `lambda` down the schedule (each solve seeded by the last)
/// and compares every entry with a direct `lambda = 0` solve.
pub fn lambda_continuation<T: Real>(
    params_base: &Params<T>,
    well: &Well,
    grid: &Arc<Grid<T>>,
    lambda_schedule: &[f64],
    opts: &SolverOptions,
) -> Result<Continuation<T>> {
    if lambda_schedule.is_empty() || lambda_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("lambda schedule must be nonempty and decreasing".into()));
    }
    if params_base.p < lit(3.0) {
        return Err(Error::Regime(format!("lambda continuation needs p in [3, 5), got {}", params_base.p)));
    }
    let sphere = SmallSphere::estimate(to_f64(params_base.p))?;
    let zero = Functional::new(grid, well, &params_base.with_lambda(T::zero()))?.with_boundary(opts.boundary);
    let limit = mountain_pass_run(&zero, &sphere, opts)?.solution;
    let mut solutions: Vec<Solution<T>> = Vec::new();
    for &lam in lambda_schedule {
        let func = Functional::new(grid, well, &params_base.with_lambda(lit(lam)))?.with_boundary(opts.boundary);
        let sol = match solutions.last() {
            None => mountain_pass_run(&func, &sphere, opts)?.solution,
            Some(prev) => continue_from(&func, prev.u.values().to_vec(), &sphere, opts)?,
        };
        solutions.push(sol);
    }
    let n0 = to_f64(limit.norm);
    let relative_gaps = solutions
        .iter()
        .map(|s| Ok(to_f64(zero.norm_values(s.u.sub(&limit.u)?.values())) / n0))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Continuation { lambdas: lambda_schedule.to_vec(), solutions, limit, relative_gaps })
}

#[derive(Debug, Clone)]
pub struct LambdaLevel<T> {
    pub lambda: f64,
    /// Failures are kept per entry so a sweep can report where the branch was lost.
    pub run: Result<MpRun<T>>,
}

/// Mountain pass for each `lambda` with one shared endpoint (built for the largest `lambda`,
/// where it is hardest to make the energy negative). Runs concurrently; output in input order.
/// Only a failure to build the shared endpoint fails the whole sweep.
pub fn lambda_sweep<T: Real>(
    params_base: &Params<T>,
    well: &Well,
    grid: &Arc<Grid<T>>,
    lambdas: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<LambdaLevel<T>>> {
    let top = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l >= 0.0)) {
        return Err(Error::InvalidInput("lambda values must be nonnegative".into()));
    }
    let sphere = SmallSphere::estimate(to_f64(params_base.p))?;
    let top_func = Functional::new(grid, well, &params_base.with_lambda(lit(top)))?.with_boundary(opts.boundary);
    let endpoint = default_endpoint(&top_func, &sphere)?;
    Ok(lambdas
        .par_iter()
        .map(|&lam| {
            let run = Functional::new(grid, well, &params_base.with_lambda(lit(lam)))
                .and_then(|f| mountain_pass_from(&f.with_boundary(opts.boundary), endpoint.clone(), &sphere, opts));
            LambdaLevel { lambda: lam, run }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct MuEntry {
    pub mu: f64,
    pub summary: SolutionSummary,
    /// `int g u^2`.
    pub g_mass: f64,
    /// `mu int g u^2`.
    pub mu_g_mass: f64,
    /// `int u^2` over the complement of `Omega0`.
    pub outside_mass: f64,
    /// Limit-problem residual on `Omega0`.
    pub limit_residual: f64,
}

#[derive(Debug, Clone)]
pub struct MuSweep<T> {
    pub entries: Vec<MuEntry>,
    pub solutions: Vec<Solution<T>>,
}

/// Independent mountain-pass solves over an increasing `mu` schedule with the free-space
/// potential, plus the confinement diagnostics of each solution.
pub fn mu_sweep<T: Real>(
    params_base: &Params<T>,
    well: &Well,
    grid: &Arc<Grid<T>>,
    mu_schedule: &[f64],
    opts: &SolverOptions,
) -> Result<MuSweep<T>> {
    if mu_schedule.is_empty() || mu_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("mu schedule must be nonempty and increasing".into()));
    }
    let sphere = SmallSphere::estimate(to_f64(params_base.p))?;
    let opts = SolverOptions { boundary: PoissonBoundary::FreeSpace, ..opts.clone() };
    let g = well.sample(grid)?;
    let w = grid.weights();
    let results: Vec<Result<(MuEntry, Solution<T>)>> = mu_schedule
        .par_iter()
        .map(|&mu| {
            let params = params_base.with_mu(lit(mu));
            let func = Functional::new(grid, well, &params)?.with_boundary(opts.boundary);
            let sol = mountain_pass_run(&func, &sphere, &opts)?.solution;
            let u = sol.u.values();
            let mut g_mass = T::zero();
            let mut outside = T::zero();
            for i in 0..u.len() {
                g_mass += w[i] * g[i] * u[i] * u[i];
                if g[i] > T::zero() {
                    outside += w[i] * u[i] * u[i];
                }
            }
            let limit_residual = to_f64(limit_problem_residual(&sol.u, well, &params)?);
            let g_mass = to_f64(g_mass);
            let entry = MuEntry {
                mu,
                summary: sol.summary(),
                g_mass,
                mu_g_mass: mu * g_mass,
                outside_mass: to_f64(outside),
                limit_residual,
            };
            Ok((entry, sol))
        })
        .collect();
    let mut entries = Vec::new();
    let mut solutions = Vec::new();
    for r in results {
        let (e, s) = r?;
        entries.push(e);
        solutions.push(s);
    }
    Ok(MuSweep { entries, solutions })
}

/// Direct solve of the limit problem on `Omega0 = B_radius` (zero Dirichlet data on its
/// boundary, free-space Hartree term, `V = 1`) on a radial grid of `n` nodes. Its strong residual
/// is the reference the confined solutions are compared with.
pub fn limit_problem_direct<T: Real>(
    params: &Params<T>,
    radius: f64,
    n: usize,
    opts: &SolverOptions,
) -> Result<Solution<T>> {
    let grid = Arc::new(Grid::radial(lit(radius), n)?);
    // with mu = 0 the well only fixes where the mountain-pass endpoint bump sits
    let well = Well::centered_ball(0.5 * radius);
    let opts = SolverOptions { boundary: PoissonBoundary::FreeSpace, ..opts.clone() };
    mountain_pass(&params.with_mu(T::zero()), &well, &grid, &opts)
}
