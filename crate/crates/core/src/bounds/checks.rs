use serde::Serialize;

use super::constants::{big_c_max, c_p};
use super::moser::moser_constants;
use super::BoundCheck;
use crate::discretization::{power_integral, Field};
use crate::error::{Error, Result};
use crate::params::{Params, Regime};
use crate::poisson::PoissonSolution;
use crate::real::{lit, to_f64, Real};

/// Pointwise bounds `|u| <= c_p phi` and `|u| <= C_{p,lambda}` of the subquadratic regime.
/// Each check reports its worst node.
pub fn check_pointwise<T: Real>(u: &Field<T>, phi: &Field<T>, params: &Params<T>) -> Result<Vec<BoundCheck>> {
    if params.regime() != Regime::Subquadratic {
        return Err(Error::Regime(format!("pointwise bounds need p in (1,2), got p = {}", params.p)));
    }
    u.check_same(phi)?;
    let cp = to_f64(c_p(params.p).expect("subquadratic"));
    let h = to_f64(u.grid().h());
    let tol = 1e-8 + h * h;

    let (mut worst, mut at) = (f64::INFINITY, 0usize);
    for (i, (&ui, &fi)) in u.values().iter().zip(phi.values()).enumerate() {
        let m = cp * to_f64(fi) - to_f64(ui).abs();
        if m < worst {
            worst = m;
            at = i;
        }
    }
    let lhs = to_f64(u.values()[at]).abs();
    let rhs = cp * to_f64(phi.values()[at]);
    let r = to_f64(u.grid().radius()[at]);
    let first = BoundCheck::upper("pointwise_u_le_cp_phi", lhs, rhs, tol).with_detail(format!("worst node {at} at |x| = {r:.6}"));

    let second = match big_c_max(params.p, params.lambda) {
        Some(c) => {
            let sup = to_f64(u.sup_norm());
            BoundCheck::upper("pointwise_u_le_big_c", sup, to_f64(c), tol)
        }
        None => BoundCheck::flag("pointwise_u_le_big_c (lambda = 0: unbounded constant)", true),
    };
    Ok(vec![first, second])
}

/// `sqrt(lambda) int |u|^3 <= (1/2) int |grad u|^2 + (lambda/2) int phi u^2`.
pub fn ps_device<T: Real>(u: &Field<T>, sol: &PoissonSolution<T>, params: &Params<T>) -> Result<BoundCheck> {
    u.check_same(&sol.phi)?;
    let grid = u.grid();
    let lam = to_f64(params.lambda);
    let cube = to_f64(power_integral(u.values(), grid.weights(), lit(3.0)));
    let grad = to_f64(grid.grad_pairing(u.values(), u.values()));
    let lhs = lam.sqrt() * cube;
    let rhs = 0.5 * grad + 0.5 * lam * to_f64(sol.coupling);
    Ok(BoundCheck::upper("ps_device", lhs, rhs, 1e-10 * (1.0 + rhs)))
}

/// Level-dependent a-priori bounds: `||u|| + |grad phi|_2 <= M` and `|u|_inf <= M0`.
#[derive(Debug, Clone, Serialize)]
pub struct APriori {
    /// Mountain-pass level bound the constants were built from.
    pub level: f64,
    /// `2 sqrt(c) + 4 c / (S_{12/5} sqrt(S0))`.
    pub m: f64,
    /// Moser bound at `|u|_6 <= 2 sqrt(c / S0)`.
    pub m0: f64,
}

/// `s0`: `D^{1,2}` Sobolev constant; `s_125`: `H^1` quotient constant for the exponent 12/5.
pub fn a_priori(level: f64, p: f64, s0: f64, s_125: f64) -> Result<APriori> {
    if !(level >= 0.0 && s0 > 0.0 && s_125 > 0.0) {
        return Err(Error::InvalidInput("a-priori bounds need level >= 0 and positive Sobolev constants".into()));
    }
    let m = 2.0 * level.sqrt() + 4.0 * level / (s_125 * s0.sqrt());
    let l = 2.0 * (level / s0).sqrt();
    let m0 = moser_constants(p, s0).simplified_bound(l);
    Ok(APriori { level, m, m0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Grid;
    use crate::poisson::solve_ball;
    use std::sync::Arc;

    #[test]
    fn zero_field_passes_with_full_margin() {
        let g = Arc::new(Grid::radial(4.0, 101).unwrap());
        let z = Field::zeros(g);
        let params = Params::new(1.5, 0.01, 10.0).unwrap();
        let c = check_pointwise(&z, &z, &params).unwrap();
        assert!(c.iter().all(|c| c.pass));
        assert_eq!(c[1].margin, c[1].rhs);
    }

    #[test]
    fn regime_mismatch() {
        let g = Arc::new(Grid::radial(4.0, 101).unwrap());
        let z = Field::zeros(g);
        assert!(matches!(check_pointwise(&z, &z, &Params::new(3.0, 1.0, 1.0).unwrap()), Err(Error::Regime(_))));
    }

    #[test]
    fn ps_device_holds_on_bumps() {
        let g = Arc::new(Grid::radial(5.0, 401).unwrap());
        for (amp, lam) in [(1.0, 0.01), (10.0, 0.5), (0.1, 2.0)] {
            let u = Field::radial_fn(g.clone(), |r: f64| amp * (1.0 - r * r / 4.0).max(0.0).powi(2));
            let sol = solve_ball(&u).unwrap();
            let c = ps_device(&u, &sol, &Params::new(1.5, lam, 0.0).unwrap()).unwrap();
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn a_priori_grows_with_level() {
        let a = a_priori(1.0, 3.0, 5.48, 10.0).unwrap();
        let b = a_priori(2.0, 3.0, 5.48, 10.0).unwrap();
        assert!(b.m > a.m && b.m0 > a.m0);
    }
}
