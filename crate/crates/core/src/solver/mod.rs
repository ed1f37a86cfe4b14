//! Critical points: mountain pass, Newton refinement, gradient flow, domain approximation,
//! ground-state selection and parameter continuation.

mod drivers;
mod flow;
mod ground;
mod mountain;
mod newton;
mod random;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use drivers::{
    domain_approximation, lambda_continuation, lambda_sweep, limit_problem_direct, mu_sweep, Continuation,
    DomainApproximation, DomainStep, LambdaLevel, MuEntry, MuSweep,
};
pub use ground::{ground_state, nonexistence_probe, FoundPoint, GroundState, ProbeOutcome, ProbeReport};
pub use flow::{gradient_flow, gradient_flow_with, FlowMode, FlowOutcome};
pub use mountain::{default_endpoint, mountain_pass, mountain_pass_from, mountain_pass_run, MpPath, MpRun};
pub use newton::refine_newton;
pub use random::random_field;

use crate::discretization::{lq_norm, Field, Grid, GridKind};
use crate::energy::{EnergyBreakdown, Functional};
use crate::error::Result;
use crate::params::Params;
use crate::poisson::PoissonBoundary;
use crate::real::{to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    MountainPass,
    Newton,
    GradientFlow,
    Continuation,
}

/// Tolerances and iteration caps shared by all solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Target for the dual norm of `I'(u)`.
    pub tol: f64,
    /// Relative Nehari tolerance `|gap| <= nehari_tol ||u||^2`.
    pub nehari_tol: f64,
    pub newton_max_iter: usize,
    /// Regularization of `|u|^{p-1} u` in the Newton derivative.
    pub newton_eps: f64,
    pub mp_samples: usize,
    /// Level decrement below which the mountain-pass deformation stops.
    pub mp_level_tol: f64,
    /// Dual residual at which the ridge sample is handed to Newton.
    pub mp_handoff_tol: f64,
    pub mp_max_sweeps: usize,
    pub flow_tol: f64,
    pub flow_max_iter: usize,
    /// Fields with `D_V` norm below this count as zero.
    pub zero_norm: f64,
    pub boundary: PoissonBoundary,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            nehari_tol: 1e-6,
            newton_max_iter: 30,
            newton_eps: 1e-8,
            mp_samples: 33,
            mp_level_tol: 1e-8,
            mp_handoff_tol: 1e-4,
            mp_max_sweeps: 20_000,
            flow_tol: 1e-6,
            flow_max_iter: 100_000,
            zero_norm: 1e-6,
            boundary: PoissonBoundary::Dirichlet,
        }
    }
}

/// A converged critical point.
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub u: Field<T>,
    pub phi: Field<T>,
    pub params: Params<T>,
    pub grid: Arc<Grid<T>>,
    pub boundary: PoissonBoundary,
    pub energy: EnergyBreakdown<T>,
    /// Dual norm of `I'(u)`.
    pub residual_norm: T,
    /// `L^2` norm of the strong residual.
    pub residual_l2: T,
    pub nehari_gap: T,
    /// `D_V` norm.
    pub norm: T,
    pub iterations: usize,
    pub provenance: Provenance,
}

impl<T: Real> Solution<T> {
    pub(crate) fn build(func: &Functional<T>, u: Vec<T>, iterations: usize, provenance: Provenance) -> Result<Self> {
        let u = func.clean(&u);
        let phi = func.phi(&u)?;
        let energy = func.breakdown(&u, &phi);
        let res = func.residual_with(&u, &phi)?;
        let norm = func.norm_values(&u);
        let grid = func.grid().clone();
        Ok(Self {
            u: Field::new(grid.clone(), u)?,
            phi: Field::new(grid.clone(), phi)?,
            params: *func.params(),
            grid,
            boundary: func.boundary(),
            energy,
            residual_norm: res.norm_dual,
            residual_l2: res.norm_l2,
            nehari_gap: res.nehari_gap,
            norm,
            iterations,
            provenance,
        })
    }

    /// `|nehari_gap| <= tol ||u||^2`.
    pub fn nehari_ok(&self, tol: f64) -> bool {
        to_f64(self.nehari_gap).abs() <= tol * to_f64(self.norm).powi(2)
    }

    pub fn summary(&self) -> SolutionSummary {
        let grid = &self.grid;
        let n2 = to_f64(self.norm).powi(2);
        SolutionSummary {
            kind: grid.kind(),
            k: to_f64(grid.k()),
            n: grid.n(),
            p: to_f64(self.params.p),
            lambda: to_f64(self.params.lambda),
            mu: to_f64(self.params.mu),
            energy: to_f64(self.energy.total),
            kinetic: to_f64(self.energy.kinetic),
            hartree: to_f64(self.energy.hartree),
            potential_power: to_f64(self.energy.potential_power),
            residual_norm: to_f64(self.residual_norm),
            residual_l2: to_f64(self.residual_l2),
            nehari_gap: to_f64(self.nehari_gap),
            nehari_relative: if n2 > 0.0 { to_f64(self.nehari_gap).abs() / n2 } else { 0.0 },
            norm: to_f64(self.norm),
            sup: to_f64(self.u.sup_norm()),
            l2: to_f64(self.u.l2_norm()),
            l6: lq_norm(&self.u, crate::real::lit(6.0)).map(to_f64).unwrap_or(f64::NAN),
            grad_phi: to_f64(grid.grad_pairing(self.phi.values(), self.phi.values())).max(0.0).sqrt(),
            iterations: self.iterations,
            provenance: self.provenance,
        }
    }
}

/// Scalar digest of a [`Solution`] for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub kind: GridKind,
    pub k: f64,
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
    pub mu: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub hartree: f64,
    pub potential_power: f64,
    pub residual_norm: f64,
    pub residual_l2: f64,
    pub nehari_gap: f64,
    pub nehari_relative: f64,
    pub norm: f64,
    pub sup: f64,
    pub l2: f64,
    pub l6: f64,
    /// `|grad phi|_2` on the grid (Dirichlet part only for free-space potentials).
    pub grad_phi: f64,
    pub iterations: usize,
    pub provenance: Provenance,
}
