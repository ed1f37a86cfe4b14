//! Closed-form constants, a-priori inequalities evaluated on computed fields, the Moser
//! `L^inf` estimator and decay fits.

mod checks;
mod constants;
mod decay;
mod limit;
mod moser;

use serde::{Deserialize, Serialize};

pub use checks::{a_priori, check_pointwise, ps_device, APriori};
pub use constants::{c_of_p, c_p, constants, constants_with_m0, big_c_max, big_c_product, ConstantSet};
pub use decay::{decay_fit, tail_mass, DecayFit};
pub use limit::limit_problem_residual;
pub use moser::{moser_bound, moser_constants, moser_ladder, MoserCheck, MoserConstants, MoserLadder};

/// One inequality `lhs <= rhs`, evaluated with an explicit tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub pass: bool,
    pub tolerance: f64,
    /// Trend checks are reported but never fail a run.
    #[serde(default)]
    pub soft: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl BoundCheck {
    /// `lhs <= rhs` up to `tolerance`.
    pub fn upper(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin,
            pass: margin.is_finite() && margin >= -tolerance,
            tolerance,
            soft: false,
            detail: None,
        }
    }

    /// `lhs >= rhs` up to `tolerance`; the margin is `lhs - rhs`.
    pub fn lower(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = lhs - rhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin,
            pass: margin >= -tolerance && margin.is_finite(),
            tolerance,
            soft: false,
            detail: None,
        }
    }

    /// A yes/no condition reported in the same shape (`lhs` = 1 when it holds).
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        let v = if holds { 1.0 } else { 0.0 };
        Self::lower(name, v, 1.0, 0.0)
    }

    pub fn soft(mut self) -> Self {
        self.soft = true;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}
