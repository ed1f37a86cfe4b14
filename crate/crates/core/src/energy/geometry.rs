use std::sync::Arc;

use serde::Serialize;

use super::functional::Functional;
use super::sobolev::SmallSphere;
use crate::discretization::{Field, Grid};
use crate::error::{Error, Result};
use crate::params::{Params, Regime};
use crate::real::{lit, to_f64, Real};
use crate::wells::{Ball, Well};

/// Fewest grid spacings across the bump radius before the bump counts as unresolved.
const MIN_NODES_ACROSS: f64 = 4.0;

/// `w_t(x) = t^2 (1 - t^2 |x - x0|^2 / eps0^2)_+^2`, supported in `B_{eps0/t}(x0)`.
pub fn bump<T: Real>(grid: &Arc<Grid<T>>, ball: &Ball, t: f64) -> Result<Field<T>> {
    let support = ball.radius / t;
    if support < MIN_NODES_ACROSS * to_f64(grid.h()) {
        return Err(Error::Unresolved(format!(
            "bump radius {support:.4} spans fewer than {MIN_NODES_ACROSS} grid spacings (h = {:.4})",
            to_f64(grid.h())
        )));
    }
    let c = ball.center;
    let eps2 = ball.radius * ball.radius;
    Ok(Field::from_fn(grid.clone(), |x, _| {
        let d2: f64 = (0..3).map(|i| (to_f64(x[i]) - c[i]).powi(2)).sum();
        let s = (1.0 - t * t * d2 / eps2).max(0.0);
        lit(t * t * s * s)
    })
    .with_dirichlet())
}

/// Mountain-pass endpoint `e` together with the quantities certifying it.
#[derive(Debug, Clone)]
pub struct Endpoint<T> {
    pub field: Field<T>,
    /// Doubling parameter that produced it.
    pub t0: f64,
    /// `||e||`.
    pub norm: f64,
    /// Energy that certified the endpoint (`I_0` when subquadratic, `I_lambda` when supercubic).
    pub energy: f64,
}

/// `e = t0 w` with `w` the bump on the inscribed ball of `Omega0`, `t0` the first power of two
/// with `I_0(e) < 0` and `||e|| > rho`. Independent of `lambda` and `mu`.
pub fn endpoint_subquadratic<T: Real>(well: &Well, grid: &Arc<Grid<T>>, p: T, sphere: &SmallSphere) -> Result<Endpoint<T>> {
    if !(p > T::one() && p < lit(2.0)) {
        return Err(Error::Regime(format!("subquadratic endpoint needs p in (1,2), got {p}")));
    }
    let ball = well.inscribed_ball();
    let w = bump(grid, &Ball { center: ball.center, radius: ball.radius }, 1.0)?;
    if w.values().iter().all(|&v| v == T::zero()) {
        return Err(Error::Unresolved("bump has no support on the grid".into()));
    }
    // lambda = 0 and supp w inside Omega0: mu is irrelevant
    let f0 = Functional::new(grid, well, &Params::new(p, T::zero(), T::zero())?)?;
    let fib = f0.fibering(&w)?;
    let mut t0 = 1.0_f64;
    for _ in 0..200 {
        let t: T = lit(t0);
        let norm = to_f64(fib.a.sqrt() * t);
        let e = to_f64(fib.value(t));
        if e < 0.0 && norm > sphere.rho {
            return Ok(Endpoint { field: w.scale(t), t0, norm, energy: e });
        }
        t0 *= 2.0;
    }
    Err(Error::NoConvergence { what: "endpoint doubling", iterations: 200, residual: f64::NAN })
}

/// `w_{t0}(x) = t0^2 w(t0 (x - x0))` with `t0` the first power of two giving
/// `I_lambda(w_{t0}) < 0` and `||w_{t0}|| > rho`.
pub fn endpoint_supercubic<T: Real>(
    well: &Well,
    grid: &Arc<Grid<T>>,
    params: &Params<T>,
    sphere: &SmallSphere,
) -> Result<Endpoint<T>> {
    if params.regime() != Regime::Supercubic {
        return Err(Error::Regime(format!("supercubic endpoint needs p in [3,5), got {}", params.p)));
    }
    let ball = well.inscribed_ball();
    let f = Functional::new(grid, well, params)?;
    let mut t0 = 1.0_f64;
    for _ in 0..60 {
        let w = bump(grid, &ball, t0)?;
        let norm = to_f64(f.norm(&w)?);
        let e = to_f64(f.energy(&w)?.total);
        if e < 0.0 && norm > sphere.rho {
            return Ok(Endpoint { field: w, t0, norm, energy: e });
        }
        t0 *= 2.0;
    }
    Err(Error::NoConvergence { what: "endpoint doubling", iterations: 60, residual: f64::NAN })
}

/// Upper bound `max_{t in [0,1]} I(t e)` for the mountain-pass level.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MpUpper {
    pub level: f64,
    pub t_star: f64,
    /// `I(e)`.
    pub endpoint_energy: f64,
    /// `I(e) < 0`, i.e. the segment belongs to the admissible path class.
    pub admissible: bool,
}

/// Samples `t -> I(t e)` on a uniform grid refined around the best sample, and cross-checks with
/// the closed-form critical point of the ray. `I(t e)` is evaluated exactly from the three ray
/// integrals (the potential of `t e` is `t^2 phi_e`).
pub fn mp_level_upper<T: Real>(functional: &Functional<T>, endpoint: &Field<T>) -> Result<MpUpper> {
    let fib = functional.fibering(endpoint)?;
    let f = |t: f64| to_f64(fib.value(lit(t)));
    let samples = 256;
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
    for i in 0..=samples {
        let t = i as f64 / samples as f64;
        let v = f(t);
        if v > best {
            best = v;
            arg = t;
        }
    }
    // refine by repeated subdivision around the incumbent
    let mut half = 1.0 / samples as f64;
    for _ in 0..60 {
        for t in [arg - half, arg - half / 2.0, arg + half / 2.0, arg + half] {
            if (0.0..=1.0).contains(&t) {
                let v = f(t);
                if v > best {
                    best = v;
                    arg = t;
                }
            }
        }
        half /= 2.0;
    }
    let (closed, targ) = fib.max_on_unit_interval();
    if to_f64(closed) > best {
        best = to_f64(closed);
        arg = to_f64(targ);
    }
    let e1 = f(1.0);
    Ok(MpUpper { level: best, t_star: arg, endpoint_energy: e1, admissible: e1 < 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sphere(p: f64) -> SmallSphere {
        // a rough constant keeps the unit tests fast; the real one comes from `estimate`
        SmallSphere::from_constant(p, if p < 2.0 { 2.5 } else { 8.7 })
    }

    #[test]
    fn subquadratic_endpoint_is_mu_independent() {
        let g = Arc::new(Grid::radial(4.0, 801).unwrap());
        let well = Well::centered_ball(1.0);
        let s = sphere(1.5);
        let e = endpoint_subquadratic(&well, &g, 1.5, &s).unwrap();
        assert!(e.energy < 0.0 && e.norm > s.rho);
        for mu in [10.0, 100.0] {
            let f = Functional::new(&g, &well, &Params::new(1.5, 0.0, mu).unwrap()).unwrap();
            assert_relative_eq!(f.energy(&e.field).unwrap().total, e.energy, max_relative = 1e-13);
            assert_relative_eq!(f.norm(&e.field).unwrap(), e.norm, max_relative = 1e-13);
        }
    }

    #[test]
    fn supercubic_scaling_identity() {
        let g = Arc::new(Grid::<f64>::radial(8.0, 2048).unwrap());
        let well = Well::centered_ball(1.0);
        let params = Params::new(3.0, 1.0, 50.0).unwrap();
        let f = Functional::new(&g, &well, &params).unwrap();
        let ball = well.inscribed_ball();
        let w = bump(&g, &ball, 1.0).unwrap();
        let phi = f.phi(w.values()).unwrap();
        let a = g.grad_pairing(w.values(), w.values());
        let b = w.l2_norm().powi(2);
        let c: f64 = (0..w.len()).map(|i| g.weights()[i] * phi[i] * w.values()[i].powi(2)).sum();
        let d = crate::discretization::power_integral(w.values(), g.weights(), 4.0);
        let mut energies = Vec::new();
        for j in 0..6 {
            let t = 2f64.powi(j);
            let e = f.energy(&bump(&g, &ball, t).unwrap()).unwrap().total;
            let model = t.powi(3) / 2.0 * a + t / 2.0 * b + t.powi(3) / 4.0 * c - t.powi(5) / 4.0 * d;
            assert_relative_eq!(e, model, max_relative = 1e-2);
            energies.push(e);
        }
        // once past the peak the energy keeps falling
        let peak = (0..6).max_by(|&i, &j| energies[i].total_cmp(&energies[j])).unwrap();
        assert!(peak < 3);
        assert!(energies[peak..].windows(2).all(|w| w[1] < w[0]));
        let end = endpoint_supercubic(&well, &g, &params, &sphere(3.0)).unwrap();
        assert!(end.energy < 0.0);
    }

    #[test]
    fn level_upper_matches_golden_section() {
        let g = Arc::new(Grid::radial(4.0, 801).unwrap());
        let well = Well::centered_ball(1.0);
        let f = Functional::new(&g, &well, &Params::new(3.0, 0.0, 10.0).unwrap()).unwrap();
        let e = bump(&g, &well.inscribed_ball(), 1.0).unwrap().scale(12.0);
        let up = mp_level_upper(&f, &e).unwrap();
        let phi = |t: f64| f.energy(&e.scale(t)).unwrap().total;
        let (mut lo, mut hi) = (0.0, 1.0);
        let gr = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = hi - gr * (hi - lo);
            let d = lo + gr * (hi - lo);
            if phi(c) > phi(d) {
                hi = d;
            } else {
                lo = c;
            }
        }
        assert!(up.admissible);
        assert!((up.level - phi(0.5 * (lo + hi))).abs() < 1e-8 * up.level.max(1.0));
    }
}
