use std::sync::Arc;

use serde::Serialize;

use crate::discretization::{power_integral, Field, Grid};
use crate::error::{Error, Result};
use crate::real::{dot, lit, Real};

/// Radial ground state of `-Delta w + w = w^{q-1}` computed by Petviashvili iteration.
#[derive(Debug, Clone)]
pub struct H1GroundState<T> {
    pub w: Field<T>,
    /// `int |grad w|^2 + w^2 / (int w^q)^{2/q}`, the best constant of `H^1 -> L^q`.
    pub quotient: T,
    pub iterations: usize,
}

/// Best constant `S_q = inf (int |grad u|^2 + u^2) / |u|_q^2` for `2 < q < 6`, evaluated at the
/// radial ground state on `grid` (Dirichlet at `r = k`; `k` should exceed ~25).
pub fn h1_ground_state<T: Real>(grid: &Arc<Grid<T>>, q: T) -> Result<H1GroundState<T>> {
    if !(q > lit(2.0) && q < lit(6.0)) {
        return Err(Error::InvalidInput(format!("H1 Sobolev exponent must lie in (2, 6), got {q}")));
    }
    let n = grid.len();
    let ones = vec![T::one(); n];
    let w8 = grid.weights();
    let s = q - T::one();
    let gamma = s / (s - T::one());
    // Petviashvili from a sech-like seed
    let mut w: Vec<T> = grid.radius().iter().map(|&r| lit::<T>(2.0) / (r.exp() + (-r).exp()) * lit(2.0)).collect();
    w[n - 1] = T::zero();
    let apply_a = |x: &[T]| {
        let mut y = vec![T::zero(); n];
        grid.apply_stiffness(x, &mut y);
        for i in 0..n {
            if grid.is_free(i) {
                y[i] += w8[i] * x[i];
            }
        }
        y
    };
    let mut iterations = 0;
    for it in 0..500 {
        iterations = it + 1;
        let nl: Vec<T> = (0..n).map(|i| if grid.is_free(i) { w8[i] * w[i].abs().powf(s) } else { T::zero() }).collect();
        let aw = apply_a(&w);
        let m = dot(&w, &aw) / dot(&w, &nl);
        let (next, _) = grid.solve_shifted(&ones, &nl, lit(1e-13))?;
        let scale = m.powf(gamma);
        let new: Vec<T> = next.iter().map(|&x| x * scale).collect();
        let diff = new.iter().zip(&w).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max);
        let top = new.iter().fold(T::zero(), |a, b| a.max(b.abs()));
        w = new;
        if diff <= lit::<T>(1e-13).max(T::solve_floor()) * top {
            break;
        }
    }
    let aw = apply_a(&w);
    let num = dot(&w, &aw);
    let den = power_integral(&w, w8, q).powf(lit::<T>(2.0) / q);
    Ok(H1GroundState { w: Field::new(grid.clone(), w)?, quotient: num / den, iterations })
}

/// `S_q` on the reference radial grid `k = 30`, `n = 6001`.
pub fn h1_sobolev(q: f64) -> Result<f64> {
    let g = Arc::new(Grid::radial(30.0, 6001)?);
    Ok(h1_ground_state(&g, q)?.quotient)
}

/// Small-sphere geometry: with `S = S_{p+1}`, `I(u) >= ||u||^2/2 - S^{-(p+1)/2} ||u||^{p+1}/(p+1)`,
/// maximal at `||u|| = rho = S^{(p+1)/(2(p-1))}` with value `alpha = (p-1)/(2(p+1)) S^{(p+1)/(p-1)}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallSphere {
    pub p: f64,
    /// `S_{p+1}`.
    pub s: f64,
    pub rho: f64,
    pub alpha: f64,
}

impl SmallSphere {
    pub fn from_constant(p: f64, s: f64) -> Self {
        let rho = s.powf((p + 1.0) / (2.0 * (p - 1.0)));
        let alpha = (p - 1.0) / (2.0 * (p + 1.0)) * s.powf((p + 1.0) / (p - 1.0));
        Self { p, s, rho, alpha }
    }

    pub fn estimate(p: f64) -> Result<Self> {
        if !(p > 1.0 && p < 5.0) {
            return Err(Error::InvalidInput(format!("p = {p} outside (1, 5)")));
        }
        Ok(Self::from_constant(p, h1_sobolev(p + 1.0)?))
    }

    /// Lower bound `||u||^2/2 - S^{-(p+1)/2} ||u||^{p+1}/(p+1)` at norm `r`.
    pub fn lower_bound(&self, r: f64) -> f64 {
        let q = self.p + 1.0;
        0.5 * r * r - self.s.powf(-q / 2.0) * r.powf(q) / q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cubic_ground_state_mass() {
        // cubic ground state in 3D: w(0) = 4.3374, int w^2 = 18.897
        let g = Arc::new(Grid::<f64>::radial(25.0, 5001).unwrap());
        let gs = h1_ground_state(&g, 4.0).unwrap();
        let mass = gs.w.l2_norm().powi(2);
        assert!((mass - 18.897).abs() < 2e-3, "mass {mass}");
        assert!((gs.w.values()[0] - 4.3374).abs() < 2e-3);
        // Pohozaev: int |grad w|^2 = 3/4 int w^4 for the cubic case in 3D
        let grad = g.grad_pairing(gs.w.values(), gs.w.values());
        let quartic = crate::discretization::power_integral(gs.w.values(), g.weights(), 4.0);
        assert_relative_eq!(grad, 0.75 * quartic, max_relative = 1e-4);
    }

    #[test]
    fn quotient_is_grid_stable_and_alpha_consistent() {
        let a = h1_ground_state(&Arc::new(Grid::radial(25.0, 2501).unwrap()), 2.5).unwrap().quotient;
        let b = h1_ground_state(&Arc::new(Grid::radial(25.0, 5001).unwrap()), 2.5).unwrap().quotient;
        assert_relative_eq!(a, b, max_relative = 1e-4);
        let sp = SmallSphere::from_constant(3.0, 8.7);
        assert_relative_eq!(sp.lower_bound(sp.rho), sp.alpha, max_relative = 1e-12);
        assert!(sp.lower_bound(sp.rho * 1.1) < sp.alpha && sp.lower_bound(sp.rho * 0.9) < sp.alpha);
    }
}
