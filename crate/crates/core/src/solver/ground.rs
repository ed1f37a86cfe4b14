use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::flow::{gradient_flow_with, FlowMode, FlowOutcome};
use super::mountain::mountain_pass_run;
use super::random::random_field;
use super::{Solution, SolverOptions};
use crate::bounds::{c_of_p, constants, BoundCheck};
use crate::discretization::Grid;
use crate::energy::{Functional, SmallSphere};
use crate::error::{Error, Result};
use crate::params::{Params, Regime};
use crate::real::{lit, to_f64, Real};
use crate::wells::Well;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One critical point met during the ground-state search.
#[derive(Debug, Clone, Serialize)]
pub struct FoundPoint {
    /// Start index (0 is the mountain pass).
    pub start: usize,
    pub energy: f64,
    pub norm: f64,
    pub residual_norm: f64,
}

#[derive(Debug, Clone)]
pub struct GroundState<T> {
    pub solution: Solution<T>,
    pub found: Vec<FoundPoint>,
    /// Starts whose flow ended at zero or failed.
    pub lost_starts: usize,
    pub sphere: SmallSphere,
    /// `mu > mu1`.
    pub above_mu1: bool,
    /// Norm lower bounds on every found point.
    pub checks: Vec<BoundCheck>,
}

/// Lowest-energy critical point among a mountain pass and `n_starts - 1` restarts. Restart `j`
/// perturbs the mountain-pass solution by a seeded random field, flips the sign on odd `j`, and
/// runs the unconstrained flow.
pub fn ground_state<T: Real>(
    params: &Params<T>,
    well: &Well,
    grid: &Arc<Grid<T>>,
    n_starts: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<GroundState<T>> {
    if params.regime() != Regime::Subquadratic {
        return Err(Error::Regime(format!("ground-state search needs p in (1, 2), got {}", params.p)));
    }
    let threshold = c_of_p(params.p).expect("subquadratic");
    if params.lambda >= threshold {
        return Err(Error::Regime(format!("lambda = {} is not below c(p) = {}", params.lambda, threshold)));
    }
    let set = constants(params);
    let above_mu1 = set.mu1.map(|m| params.mu > m).unwrap_or(false);
    let sphere = SmallSphere::estimate(to_f64(params.p))?;
    let func = Functional::new(grid, well, params)?.with_boundary(opts.boundary);
    let mp = mountain_pass_run(&func, &sphere, opts)?.solution;
    let top = to_f64(mp.u.sup_norm());
    let restarts: Vec<Result<FlowOutcome<T>>> = (1..n_starts.max(1))
        .into_par_iter()
        .map(|j| {
            let mut rng = rng_for(seed, j as u64);
            let noise = random_field(grid, well.extent() + well.tau, &mut rng);
            let amp = rng.gen_range(0.05..0.5) * top / to_f64(noise.sup_norm()).max(f64::MIN_POSITIVE);
            let sign: T = if j % 2 == 1 { -T::one() } else { T::one() };
            let u0: Vec<T> = mp.u.values().iter().zip(noise.values()).map(|(&a, &b)| sign * (a + lit::<T>(amp) * b)).collect();
            gradient_flow_with(&func, u0, FlowMode::Unconstrained, opts)
        })
        .collect();
    let mut found = vec![FoundPoint {
        start: 0,
        energy: to_f64(mp.energy.total),
        norm: to_f64(mp.norm),
        residual_norm: to_f64(mp.residual_norm),
    }];
    let mut best = mp;
    let mut lost = 0;
    for (j, r) in restarts.into_iter().enumerate() {
        match r {
            Ok(FlowOutcome::Converged(s)) => {
                found.push(FoundPoint {
                    start: j + 1,
                    energy: to_f64(s.energy.total),
                    norm: to_f64(s.norm),
                    residual_norm: to_f64(s.residual_norm),
                });
                if s.energy.total < best.energy.total {
                    best = s;
                }
            }
            _ => lost += 1,
        }
    }
    let consistent = sphere.rho;
    let literal = sphere.s.powf(-(sphere.p + 1.0) / (sphere.p - 1.0));
    let mut checks = Vec::new();
    for f in &found {
        checks.push(BoundCheck::lower(format!("norm_lower_bound[start {}]", f.start), f.norm, consistent, 0.0));
        checks.push(
            BoundCheck::lower(format!("norm_lower_bound_literal[start {}]", f.start), f.norm, literal, 0.0)
                .soft()
                .with_detail("S^{-(p+1)/(p-1)}"),
        );
    }
    let min = found.iter().map(|f| f.energy).fold(f64::INFINITY, f64::min);
    checks.push(BoundCheck::upper("ground_state_is_minimal", to_f64(best.energy.total), min, 0.0));
    Ok(GroundState { solution: best, found, lost_starts: lost, sphere, above_mu1, checks })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeOutcome {
    pub start: usize,
    pub decayed: bool,
    pub final_norm: Option<f64>,
    pub final_energy: Option<f64>,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Outcome of the nonexistence diagnostic. Only ever reports what the flows did.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub lambda: f64,
    pub c_of_p: Option<f64>,
    pub outcomes: Vec<ProbeOutcome>,
    /// Every flow fell below the zero threshold.
    pub all_decayed: bool,
    pub summary: String,
}

/// Unconstrained gradient flows from `n_inits` seeded random fields.
pub fn nonexistence_probe<T: Real>(
    params: &Params<T>,
    well: &Well,
    grid: &Arc<Grid<T>>,
    n_inits: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<ProbeReport> {
    let func = Functional::new(grid, well, params)?.with_boundary(opts.boundary);
    let outcomes: Vec<ProbeOutcome> = (0..n_inits)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let u0 = random_field(grid, well.extent() + well.tau, &mut rng);
            match gradient_flow_with(&func, u0.into_values(), FlowMode::Unconstrained, opts) {
                Ok(FlowOutcome::Zero { iterations, norm, energy }) => ProbeOutcome {
                    start: i,
                    decayed: true,
                    final_norm: Some(norm),
                    final_energy: Some(energy),
                    iterations,
                    error: None,
                },
                Ok(FlowOutcome::Converged(s)) => ProbeOutcome {
                    start: i,
                    decayed: false,
                    final_norm: Some(to_f64(s.norm)),
                    final_energy: Some(to_f64(s.energy.total)),
                    iterations: s.iterations,
                    error: None,
                },
                Err(e) => ProbeOutcome {
                    start: i,
                    decayed: false,
                    final_norm: None,
                    final_energy: None,
                    iterations: 0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let decayed = outcomes.iter().filter(|o| o.decayed).count();
    let all_decayed = decayed == n_inits;
    let summary = if all_decayed {
        format!("no critical point found from {n_inits} initializations")
    } else {
        format!("{} of {n_inits} initializations did not decay to zero", n_inits - decayed)
    };
    Ok(ProbeReport { lambda: to_f64(params.lambda), c_of_p: c_of_p(params.p).map(to_f64), outcomes, all_decayed, summary })
}
