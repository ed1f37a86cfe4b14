//! JSON run configuration.
//!
//! ```json
//! {
//!   "mode": "solve",
//!   "params": { "p": 3.0, "lambda": 1.0, "mu": 50.0 },
//!   "well": { "omega0": { "type": "ball", "center": [0, 0, 0], "radius": 1.0 }, "tau": 0.25 },
//!   "grid": { "kind": "radial", "k": 8.0, "n": 2048 },
//!   "solver": { "tol": 1e-10 },
//!   "seed": 0
//! }
//! ```
//!
//! Mode-specific fields: `grid.k_schedule` + `grid.h` (domain-approx), `sweep.lambdas`
//! (lambda-sweep), `sweep.mus` (mu-sweep), `n_starts` (ground-state), `n_inits`
//! (nonexistence-probe).

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spwell::bounds::{c_of_p, constants};
use spwell::discretization::GridKind;
use spwell::params::Regime;
use spwell::solver::SolverOptions;
use spwell::{Params, Well};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    GroundState,
    DomainApprox,
    LambdaSweep,
    MuSweep,
    Verify,
    NonexistenceProbe,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_kind")]
    pub kind: GridKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Nodes (radial) or nodes per axis (box3d).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_schedule: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

fn default_kind() -> GridKind {
    GridKind::Radial
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { kind: GridKind::Radial, k: None, n: None, k_schedule: None, h: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaMethod {
    /// Independent mountain passes sharing one endpoint.
    #[default]
    Independent,
    /// Branch following down a decreasing schedule, compared with a `lambda = 0` solve.
    Continuation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub lambda_method: LambdaMethod,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mus: Vec<f64>,
    /// Radial nodes of the direct limit-problem solve used as the mu-sweep reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_reference_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: Params,
    #[serde(default = "default_well")]
    pub well: Well,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default = "default_starts")]
    pub n_starts: usize,
    #[serde(default = "default_inits")]
    pub n_inits: usize,
    #[serde(default = "default_true")]
    pub dump_fields: bool,
}

fn default_well() -> Well {
    Well::centered_ball(1.0)
}
fn default_starts() -> usize {
    8
}
fn default_inits() -> usize {
    20
}
fn default_true() -> bool {
    true
}

/// Invalid configuration, located by its JSON path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "invalid config: {}", self.message)
        } else {
            write!(f, "invalid config at `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    /// Parses and validates; returns the config with its regime warnings.
    pub fn parse(text: &str) -> Result<(Self, Vec<String>), ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig =
            serde_path_to_error::deserialize(de).map_err(|e| ConfigError::at(e.path().to_string(), e.inner().to_string()))?;
        let warnings = cfg.validate()?;
        Ok((cfg, warnings))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Structural checks are errors; regime mismatches are warnings.
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        self.params.validate().map_err(|e| ConfigError::at("params", e.to_string()))?;
        self.well.validate().map_err(|e| ConfigError::at("well", e.to_string()))?;
        self.validate_solver()?;
        let needs_grid = !matches!(self.mode, Mode::Verify | Mode::DomainApprox);
        if needs_grid {
            let k = self.grid.k.ok_or_else(|| ConfigError::at("grid.k", format!("required for mode {}", self.mode)))?;
            let n = self.grid.n.ok_or_else(|| ConfigError::at("grid.n", format!("required for mode {}", self.mode)))?;
            if !(k > 0.0 && k.is_finite()) {
                return Err(ConfigError::at("grid.k", "must be positive"));
            }
            if !(self.well.extent() < k) {
                return Err(ConfigError::at("well", format!("Omega0 (extent {}) must lie inside B_k, k = {k}", self.well.extent())));
            }
            let min = if self.grid.kind == GridKind::Radial { 3 } else { 5 };
            if n < min {
                return Err(ConfigError::at("grid.n", format!("need at least {min} nodes")));
            }
        }
        if self.grid.kind == GridKind::Radial && needs_grid && !self.well.is_radial() {
            return Err(ConfigError::at("well", "a radial grid needs Omega0 centred at the origin"));
        }
        match self.mode {
            Mode::DomainApprox => {
                let ks = self
                    .grid
                    .k_schedule
                    .as_ref()
                    .ok_or_else(|| ConfigError::at("grid.k_schedule", "required for mode domain-approx"))?;
                if ks.is_empty() || ks.windows(2).any(|w| w[1] <= w[0]) || ks[0] <= self.well.extent() {
                    return Err(ConfigError::at("grid.k_schedule", "must be increasing and start outside Omega0"));
                }
                let h = self.grid.h.ok_or_else(|| ConfigError::at("grid.h", "required for mode domain-approx"))?;
                if !(h > 0.0 && h < ks[0] / 2.0) {
                    return Err(ConfigError::at("grid.h", "must be positive and resolve the first radius"));
                }
                if self.grid.kind == GridKind::Radial && !self.well.is_radial() {
                    return Err(ConfigError::at("well", "a radial grid needs Omega0 centred at the origin"));
                }
            }
            Mode::LambdaSweep => {
                let l = &self.sweep.lambdas;
                if l.is_empty() || l.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                    return Err(ConfigError::at("sweep.lambdas", "needs nonnegative values"));
                }
                let ordered = match self.sweep.lambda_method {
                    LambdaMethod::Independent => l.windows(2).all(|w| w[1] > w[0]),
                    LambdaMethod::Continuation => l.windows(2).all(|w| w[1] < w[0]),
                };
                if !ordered {
                    return Err(ConfigError::at(
                        "sweep.lambdas",
                        "independent sweeps run upward, continuation runs downward (strictly)",
                    ));
                }
            }
            Mode::MuSweep => {
                let m = &self.sweep.mus;
                if m.is_empty() || m.iter().any(|&x| !(x >= 0.0 && x.is_finite())) || m.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ConfigError::at("sweep.mus", "needs an increasing list of nonnegative values"));
                }
                if self.sweep.limit_reference_n.is_some_and(|n| n < 3) {
                    return Err(ConfigError::at("sweep.limit_reference_n", "need at least 3 nodes"));
                }
            }
            Mode::GroundState if self.n_starts == 0 => return Err(ConfigError::at("n_starts", "must be at least 1")),
            Mode::NonexistenceProbe if self.n_inits == 0 => return Err(ConfigError::at("n_inits", "must be at least 1")),
            _ => {}
        }
        Ok(self.regime_warnings())
    }

    fn validate_solver(&self) -> Result<(), ConfigError> {
        let s = &self.solver;
        let positive = [
            ("solver.tol", s.tol),
            ("solver.nehari_tol", s.nehari_tol),
            ("solver.newton_eps", s.newton_eps),
            ("solver.mp_level_tol", s.mp_level_tol),
            ("solver.mp_handoff_tol", s.mp_handoff_tol),
            ("solver.flow_tol", s.flow_tol),
            ("solver.zero_norm", s.zero_norm),
        ];
        for (path, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::at(path, "must be positive"));
            }
        }
        if s.mp_samples < 3 {
            return Err(ConfigError::at("solver.mp_samples", "need at least 3 samples"));
        }
        Ok(())
    }

    /// Mismatches with the existence hypotheses. Runs still proceed.
    fn regime_warnings(&self) -> Vec<String> {
        let p = &self.params;
        let mut out = Vec::new();
        let mus: Vec<f64> = match self.mode {
            Mode::MuSweep => self.sweep.mus.clone(),
            _ => vec![p.mu],
        };
        match p.regime() {
            Regime::Intermediate => out.push(format!("p = {} lies in [2, 3): no existence result covers it", p.p)),
            Regime::Supercubic => {
                if p.lambda == 0.0 && self.mode != Mode::LambdaSweep {
                    out.push("lambda = 0 removes the Hartree term".into());
                }
            }
            Regime::Subquadratic => {
                let c = c_of_p(p.p).expect("subquadratic");
                let lambdas: Vec<f64> = match self.mode {
                    Mode::LambdaSweep => self.sweep.lambdas.clone(),
                    _ => vec![p.lambda],
                };
                for &l in &lambdas {
                    if l >= c && self.mode != Mode::NonexistenceProbe {
                        out.push(format!("lambda = {l} is not below c(p) = {c}"));
                    }
                    if l == 0.0 {
                        out.push("lambda = 0: the subquadratic constants are undefined".into());
                    }
                }
                if self.mode == Mode::NonexistenceProbe && p.lambda < c {
                    out.push(format!("lambda = {} is below c(p) = {c}; decay to zero is not expected", p.lambda));
                }
                if let Some(mu1) = constants(p).mu1 {
                    for &m in &mus {
                        if m <= mu1 {
                            out.push(format!("mu = {m} is not above mu1 = {mu1:.6}"));
                        }
                    }
                }
            }
        }
        out
    }
}
