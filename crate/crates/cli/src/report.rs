//! Run reports. Everything here is a pure function of (config, seed); wall-clock data lives in
//! [`Timings`] and is written to a separate file.

use serde::Serialize;
use spwell::bounds::{APriori, BoundCheck, DecayFit, MoserCheck};
use spwell::energy::SmallSphere;
use spwell::solver::{FoundPoint, MpPath, ProbeReport, SolutionSummary};
use spwell::ConstantSet;

use crate::config::{Mode, RunConfig};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub mode: Mode,
    /// Effective configuration (seed applied, output directory dropped).
    pub config: RunConfig,
    pub warnings: Vec<String>,
    pub constants: ConstantSet,
    pub sobolev: SobolevReport,
    pub entries: Vec<EntryReport>,
    /// Run-level checks (oracles, trends across entries).
    pub checks: Vec<BoundCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Details>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub tally: Tally,
}

#[derive(Debug, Clone, Serialize)]
pub struct SobolevReport {
    /// `D^{1,2}` constant from the truncated extremal profile.
    pub s0_estimate: f64,
    pub s0_sharp: f64,
    /// `H^1` quotient constant `S_{p+1}` and the small-sphere radius/level built from it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_sphere: Option<SmallSphere>,
}

/// One solved configuration (one row of the sweep table).
#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub label: String,
    pub solution: SolutionSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mountain_pass: Option<MpReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moser: Option<MoserCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_priori: Option<APriori>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayFit>,
    /// `int_{|x| > k/2} |grad u|^2 + u^2`.
    pub tail_mass_half: f64,
    /// `int g u^2`.
    pub g_mass: f64,
    pub mu_g_mass: f64,
    /// `int u^2` where `g > 0`.
    pub outside_mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_residual: Option<f64>,
    pub checks: Vec<BoundCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MpReport {
    /// `max_{t in [0,1]} I(t e)`.
    pub upper_level: f64,
    pub t_star: f64,
    pub endpoint_energy: f64,
    pub endpoint_admissible: bool,
    pub endpoint_t0: f64,
    pub endpoint_norm: f64,
    pub initial_level: f64,
    pub ridge_level: f64,
    pub final_level: f64,
    pub sweeps: usize,
    pub path: MpPath,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Details {
    Verify(VerifyReport),
    GroundState {
        found: Vec<FoundPoint>,
        lost_starts: usize,
        /// `mu > mu1`: the hypotheses of the ground-state result hold.
        above_mu1: bool,
    },
    DomainApprox {
        h: f64,
        steps: Vec<DomainStepReport>,
        differences_decreasing: bool,
    },
    LambdaSweep {
        lambdas: Vec<f64>,
        levels: Vec<Option<f64>>,
        errors: Vec<Option<String>>,
        /// Largest lambda up to which every run of the upward sweep succeeded.
        last_success: Option<f64>,
        first_failure: Option<f64>,
    },
    Continuation {
        lambdas: Vec<f64>,
        relative_gaps: Vec<f64>,
        limit_energy: f64,
    },
    MuSweep {
        #[serde(skip_serializing_if = "Option::is_none")]
        limit_reference: Option<LimitReference>,
    },
    NonexistenceProbe(ProbeReport),
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainStepReport {
    pub k: f64,
    pub cauchy_diff: Option<f64>,
    pub tail_mass: f64,
    pub tail_product: f64,
    pub monopole_corrected_energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReference {
    pub radius: f64,
    pub n: usize,
    pub energy: f64,
    pub residual_l2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub constant_grid_points: usize,
    pub constant_max_gap: f64,
    pub moser: Vec<LadderReport>,
    pub poisson_n: usize,
    pub phi_center: f64,
    pub phi_edge: f64,
    pub identity_gap: f64,
    pub random_bumps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderReport {
    pub p: f64,
    pub delta: f64,
    pub f_last: f64,
    pub g_last: f64,
    pub f_inf: f64,
    pub g_inf: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub hard_pass: usize,
    pub hard_fail: usize,
    pub soft_pass: usize,
    pub soft_fail: usize,
}

impl RunReport {
    pub fn all_checks(&self) -> impl Iterator<Item = &BoundCheck> {
        self.entries.iter().flat_map(|e| e.checks.iter()).chain(self.checks.iter())
    }

    pub fn recount(&mut self) {
        self.tally = tally(self.all_checks());
    }

    /// Exit status contract: every hard check passed and nothing failed.
    pub fn ok(&self) -> bool {
        self.failure.is_none() && self.all_checks().all(|c| c.soft || c.pass)
    }

    pub fn failed_hard(&self) -> Vec<&BoundCheck> {
        self.all_checks().filter(|c| !c.soft && !c.pass).collect()
    }

    pub fn find(&self, name: &str) -> Option<&BoundCheck> {
        self.all_checks().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn tally<'a>(checks: impl Iterator<Item = &'a BoundCheck>) -> Tally {
    let mut t = Tally::default();
    for c in checks {
        match (c.soft, c.pass) {
            (false, true) => t.hard_pass += 1,
            (false, false) => t.hard_fail += 1,
            (true, true) => t.soft_pass += 1,
            (true, false) => t.soft_fail += 1,
        }
    }
    t
}

/// Wall-clock data, kept out of the report so reports stay byte-reproducible.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub phases: Vec<Phase>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Phase {
    pub name: String,
    pub seconds: f64,
}
