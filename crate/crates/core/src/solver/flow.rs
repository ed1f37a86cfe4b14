use serde::{Deserialize, Serialize};

use super::newton::newton;
use super::{Provenance, Solution, SolverOptions};
use crate::discretization::Field;
use crate::energy::Functional;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::real::{lit, to_f64, Real};
use crate::wells::Well;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowMode {
    /// Nehari-projected when `p >= 3`, unconstrained otherwise.
    Auto,
    Unconstrained,
    Nehari,
}

#[derive(Debug, Clone)]
pub enum FlowOutcome<T> {
    Converged(Solution<T>),
    /// The iterate fell below the zero threshold.
    Zero { iterations: usize, norm: f64, energy: f64 },
}

impl<T> FlowOutcome<T> {
    pub fn solution(&self) -> Option<&Solution<T>> {
        match self {
            FlowOutcome::Converged(s) => Some(s),
            FlowOutcome::Zero { .. } => None,
        }
    }
}

/// Sobolev-gradient descent from `u0` followed by Newton polishing.
pub fn gradient_flow<T: Real>(u0: &Field<T>, params: &Params<T>, well: &Well, opts: &SolverOptions) -> Result<FlowOutcome<T>> {
    let func = Functional::new(u0.grid(), well, params)?.with_boundary(opts.boundary);
    func.check(u0)?;
    gradient_flow_with(&func, func.clean(u0.values()), FlowMode::Auto, opts)
}

/// Point on the Nehari manifold along the ray through `v`, with its energy.
fn project<T: Real>(func: &Functional<T>, v: &[T]) -> Result<Option<(Vec<T>, T)>> {
    let fib = func.fibering_values(v)?;
    Ok(fib.first_peak().map(|t| (v.iter().map(|&x| x * t).collect(), fib.value(t))))
}

pub fn gradient_flow_with<T: Real>(
    func: &Functional<T>,
    u0: Vec<T>,
    mode: FlowMode,
    opts: &SolverOptions,
) -> Result<FlowOutcome<T>> {
    let nehari = match mode {
        FlowMode::Auto => func.params().p >= lit(3.0),
        FlowMode::Unconstrained => false,
        FlowMode::Nehari => true,
    };
    let mut u = u0;
    if nehari {
        if let Some((v, _)) = project(func, &u)? {
            u = v;
        }
    }
    let mut energy = func.value(&u)?;
    let mut tau = T::one();
    let tau_max: T = lit(1024.0);
    let round = lit::<T>(100.0) * T::epsilon();
    let mut iterations = 0;
    loop {
        let norm = func.norm_values(&u);
        if to_f64(norm) < opts.zero_norm {
            return Ok(FlowOutcome::Zero { iterations, norm: to_f64(norm), energy: to_f64(energy) });
        }
        let phi = func.phi_if_needed(&u)?;
        let g = func.gradient(&u, &phi);
        let (s, dual) = func.sobolev_gradient(&g)?;
        if to_f64(dual) <= opts.flow_tol {
            break;
        }
        if iterations >= opts.flow_max_iter {
            return Err(Error::NoConvergence { what: "gradient flow", iterations, residual: to_f64(dual) });
        }
        iterations += 1;
        let d2 = dual * dual;
        let mut accepted = None;
        while tau > lit(1e-14) {
            let trial: Vec<T> = u.iter().zip(&s).map(|(&a, &b)| a - tau * b).collect();
            let (cand, e) = if nehari {
                match project(func, &trial)? {
                    Some(x) => x,
                    None => {
                        let e = func.value(&trial)?;
                        (trial, e)
                    }
                }
            } else {
                let e = func.value(&trial)?;
                (trial, e)
            };
            let sufficient = e <= energy - lit::<T>(1e-4) * tau * d2;
            // below roundoff the energy cannot rank the steps; the residual can
            let flat = (e - energy).abs() <= round * energy.abs();
            if e.is_finite() && (sufficient || (flat && smaller_dual(func, &cand, dual)?)) {
                accepted = Some((cand, e));
                break;
            }
            tau /= lit(2.0);
        }
        match accepted {
            Some((v, e)) => {
                u = v;
                energy = e;
                tau = (tau * lit(2.0)).min(tau_max);
            }
            None => {
                if to_f64(dual) <= opts.flow_tol * 1e3 {
                    break;
                }
                return Err(Error::StepUnderflow("gradient flow"));
            }
        }
    }
    let res = newton(func, u.clone(), opts)?;
    if !res.converged {
        return Err(Error::NoConvergence { what: "Newton after gradient flow", iterations: res.steps, residual: to_f64(res.dual) });
    }
    if to_f64(func.norm_values(&res.u)) < opts.zero_norm {
        return Ok(FlowOutcome::Zero { iterations, norm: to_f64(func.norm_values(&res.u)), energy: 0.0 });
    }
    Ok(FlowOutcome::Converged(Solution::build(func, res.u, iterations + res.steps, Provenance::GradientFlow)?))
}

fn smaller_dual<T: Real>(func: &Functional<T>, v: &[T], dual: T) -> Result<bool> {
    let phi = func.phi_if_needed(v)?;
    let (_, d) = func.sobolev_gradient(&func.gradient(v, &phi))?;
    Ok(d < (T::one() - lit::<T>(1e-3)) * dual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::discretization::Grid;

    #[test]
    fn zero_start_is_zero() {
        let g = Arc::new(Grid::<f64>::radial(4.0, 201).unwrap());
        let out = gradient_flow(&Field::zeros(g), &Params::new(3.0, 1.0, 10.0).unwrap(), &Well::centered_ball(1.0), &SolverOptions::default())
            .unwrap();
        assert!(matches!(out, FlowOutcome::Zero { .. }));
    }
}
