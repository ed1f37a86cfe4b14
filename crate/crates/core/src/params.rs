use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Which part of `(1, 5)` the exponent falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `p` in `(1, 2)`.
    Subquadratic,
    /// `p` in `[2, 3)`: accepted for evaluation only.
    Intermediate,
    /// `p` in `[3, 5)`.
    Supercubic,
}

/// The triple `(p, lambda, mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params<T> {
    pub p: T,
    pub lambda: T,
    pub mu: T,
}

impl<T: Real> Params<T> {
    pub fn new(p: T, lambda: T, mu: T) -> Result<Self> {
        let out = Self { p, lambda, mu };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.lambda.is_finite() && self.mu.is_finite()) {
            return Err(Error::InvalidInput("non-finite parameter".into()));
        }
        if !(self.p > T::one() && self.p < lit(5.0)) {
            return Err(Error::InvalidInput(format!("p = {} outside (1, 5)", self.p)));
        }
        if self.lambda < T::zero() {
            return Err(Error::InvalidInput(format!("lambda = {} < 0", self.lambda)));
        }
        if self.mu < T::zero() {
            return Err(Error::InvalidInput(format!("mu = {} < 0", self.mu)));
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        if self.p < lit(2.0) {
            Regime::Subquadratic
        } else if self.p < lit(3.0) {
            Regime::Intermediate
        } else {
            Regime::Supercubic
        }
    }

    pub fn with_lambda(self, lambda: T) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_mu(self, mu: T) -> Self {
        Self { mu, ..self }
    }

    pub fn cast<U: Real>(&self) -> Params<U> {
        Params {
            p: lit(crate::real::to_f64(self.p)),
            lambda: lit(crate::real::to_f64(self.lambda)),
            mu: lit(crate::real::to_f64(self.mu)),
        }
    }
}
