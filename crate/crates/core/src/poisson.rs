//! `-Delta phi = u^2` on `B_k` (Dirichlet) and on `R^3` (Newtonian potential).

use serde::{Deserialize, Serialize};

use crate::bounds::BoundCheck;
use crate::discretization::{lq_norm, Field, Grid, GridKind};
use crate::error::{Error, Result};
use crate::linalg;
use crate::real::{lit, to_f64, Real};

/// Boundary treatment for the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PoissonBoundary {
    /// `phi = 0` on `|x| = k`.
    #[default]
    Dirichlet,
    /// Newtonian potential of the charge (charge supported in `B_k`). Radial grids impose the
    /// exact exterior condition `phi'(k) = -phi(k)/k`; box grids add the monopole `Q/(4 pi k)`
    /// to the Dirichlet solution.
    FreeSpace,
}

#[derive(Debug, Clone)]
pub struct PoissonSolution<T> {
    pub phi: Field<T>,
    /// `int |grad phi|^2` (over `R^3` for the free-space setting).
    pub grad_energy: T,
    /// `int phi u^2`.
    pub coupling: T,
    pub iterations: usize,
    /// Relative strong residual `||Delta_h phi + u^2|| / ||u^2||` on the free nodes.
    pub residual: T,
}

pub(crate) const POISSON_TOL: f64 = 1e-12;

/// Dirichlet problem on `B_k`.
pub fn solve_ball<T: Real>(u: &Field<T>) -> Result<PoissonSolution<T>> {
    solve_potential(u, PoissonBoundary::Dirichlet)
}

pub fn solve_potential<T: Real>(u: &Field<T>, boundary: PoissonBoundary) -> Result<PoissonSolution<T>> {
    if u.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value in Poisson source".into()));
    }
    let grid = u.grid();
    let rho: Vec<T> = u.values().iter().map(|&v| v * v).collect();
    let (phi, iterations) = potential(grid, &rho, boundary)?;
    let w = grid.weights();
    let coupling: T = match (grid.kind(), boundary) {
        (GridKind::Radial, PoissonBoundary::FreeSpace) => (0..rho.len()).map(|i| w[i] * phi[i] * rho[i]).sum(),
        _ => (0..rho.len()).filter(|&i| grid.is_free(i)).map(|i| w[i] * phi[i] * rho[i]).sum(),
    };
    let grad_energy = potential_energy(grid, &phi, &rho, boundary);
    let residual = strong_residual(grid, &phi, &rho, boundary);
    Ok(PoissonSolution { phi: Field::from_vec_unchecked(grid.clone(), phi), grad_energy, coupling, iterations, residual })
}

/// Solves for the potential of the density `rho` (already squared).
pub(crate) fn potential<T: Real>(grid: &Grid<T>, rho: &[T], boundary: PoissonBoundary) -> Result<(Vec<T>, usize)> {
    let w = grid.weights();
    match (grid.kind(), boundary) {
        (GridKind::Radial, PoissonBoundary::FreeSpace) => {
            let rhs: Vec<T> = rho.iter().zip(w).map(|(&r, &wi)| r * wi).collect();
            let (lower, diag, upper) = robin_matrix(grid);
            let phi = linalg::tridiag::solve(&lower, &diag, &upper, &rhs).ok_or(Error::Singular("radial Poisson"))?;
            Ok((phi, 1))
        }
        (_, PoissonBoundary::Dirichlet) => {
            let rhs: Vec<T> = (0..rho.len()).map(|i| if grid.is_free(i) { rho[i] * w[i] } else { T::zero() }).collect();
            let zero = vec![T::zero(); rho.len()];
            grid.solve_shifted(&zero, &rhs, lit(POISSON_TOL))
        }
        (GridKind::Box3d, PoissonBoundary::FreeSpace) => {
            let (mut phi, it) = potential(grid, rho, PoissonBoundary::Dirichlet)?;
            let q: T = (0..rho.len()).filter(|&i| grid.is_free(i)).map(|i| w[i] * rho[i]).sum();
            let four_pi = lit::<T>(4.0) * T::PI();
            for (i, p) in phi.iter_mut().enumerate() {
                let r = grid.radius()[i].max(grid.k());
                *p = if grid.is_free(i) { *p + q / (four_pi * grid.k()) } else { q / (four_pi * r) };
            }
            Ok((phi, it))
        }
    }
}

/// Tridiagonal stiffness on all radial nodes with the exterior condition at `r = k`.
pub(crate) fn robin_matrix<T: Real>(grid: &Grid<T>) -> (Vec<T>, Vec<T>, Vec<T>) {
    let n = grid.n();
    let a = grid.radial_edges();
    let mut lower = vec![T::zero(); n];
    let mut diag = vec![T::zero(); n];
    let mut upper = vec![T::zero(); n];
    for e in 0..n - 1 {
        diag[e] += a[e];
        diag[e + 1] += a[e];
        upper[e] = -a[e];
        lower[e + 1] = -a[e];
    }
    diag[n - 1] += lit::<T>(4.0) * T::PI() * grid.k();
    (lower, diag, upper)
}

fn potential_energy<T: Real>(grid: &Grid<T>, phi: &[T], rho: &[T], boundary: PoissonBoundary) -> T {
    match (grid.kind(), boundary) {
        (GridKind::Radial, PoissonBoundary::FreeSpace) => {
            let a = grid.radial_edges();
            let n = grid.n();
            let mut s = T::zero();
            for e in 0..n - 1 {
                let d = phi[e] - phi[e + 1];
                s += a[e] * d * d;
            }
            s + lit::<T>(4.0) * T::PI() * grid.k() * phi[n - 1] * phi[n - 1]
        }
        (GridKind::Box3d, PoissonBoundary::FreeSpace) => {
            let w = grid.weights();
            let q: T = (0..rho.len()).filter(|&i| grid.is_free(i)).map(|i| w[i] * rho[i]).sum();
            let shift = q / (lit::<T>(4.0) * T::PI() * grid.k());
            let inner: Vec<T> = phi.iter().map(|&p| p - shift).collect();
            grid.grad_pairing(&inner, &inner) + q * shift
        }
        _ => grid.grad_pairing(phi, phi),
    }
}

fn strong_residual<T: Real>(grid: &Grid<T>, phi: &[T], rho: &[T], boundary: PoissonBoundary) -> T {
    let w = grid.weights();
    let (mut num, mut den) = (T::zero(), T::zero());
    match (grid.kind(), boundary) {
        (GridKind::Radial, PoissonBoundary::FreeSpace) => {
            let (lower, diag, upper) = robin_matrix(grid);
            let n = grid.n();
            for i in 0..n {
                let mut s = diag[i] * phi[i];
                if i > 0 {
                    s += lower[i] * phi[i - 1];
                }
                if i + 1 < n {
                    s += upper[i] * phi[i + 1];
                }
                let r = s / w[i] - rho[i];
                num += w[i] * r * r;
                den += w[i] * rho[i] * rho[i];
            }
        }
        _ => {
            let shift = if boundary == PoissonBoundary::FreeSpace {
                let q: T = (0..rho.len()).filter(|&i| grid.is_free(i)).map(|i| w[i] * rho[i]).sum();
                q / (lit::<T>(4.0) * T::PI() * grid.k())
            } else {
                T::zero()
            };
            let inner: Vec<T> = phi.iter().map(|&p| p - shift).collect();
            let lap = grid.neg_laplacian(&inner);
            for i in 0..phi.len() {
                if grid.is_free(i) {
                    let r = lap[i] - rho[i];
                    num += w[i] * r * r;
                    den += w[i] * rho[i] * rho[i];
                }
            }
        }
    }
    if den == T::zero() {
        T::zero()
    } else {
        (num / den).sqrt()
    }
}

/// Newtonian potential of a radial charge by the kernel quadrature
/// `phi(r) = (1/r) int_0^r s^2 u^2 ds + int_r^k s u^2 ds` (trapezoid on the nodes).
pub fn solve_free<T: Real>(u: &Field<T>) -> Result<PoissonSolution<T>> {
    let grid = u.grid();
    if grid.kind() != GridKind::Radial {
        return Err(Error::NotRadial);
    }
    let r = grid.radius();
    let n = grid.n();
    let h = grid.h();
    let half = lit::<T>(0.5);
    let rho: Vec<T> = u.values().iter().map(|&v| v * v).collect();
    let mut inner = vec![T::zero(); n];
    for i in 1..n {
        inner[i] = inner[i - 1] + half * h * (r[i - 1] * r[i - 1] * rho[i - 1] + r[i] * r[i] * rho[i]);
    }
    let mut outer = vec![T::zero(); n];
    for i in (0..n - 1).rev() {
        outer[i] = outer[i + 1] + half * h * (r[i] * rho[i] + r[i + 1] * rho[i + 1]);
    }
    let phi: Vec<T> = (0..n).map(|i| if i == 0 { outer[0] } else { inner[i] / r[i] + outer[i] }).collect();
    let w = grid.weights();
    let coupling: T = (0..n).map(|i| w[i] * phi[i] * rho[i]).sum();
    // int |grad phi|^2 over R^3: interior edges plus the exterior 1/r tail
    let a = grid.radial_edges();
    let mut grad_energy = T::zero();
    for e in 0..n - 1 {
        let d = phi[e] - phi[e + 1];
        grad_energy += a[e] * d * d;
    }
    grad_energy += lit::<T>(4.0) * T::PI() * grid.k() * phi[n - 1] * phi[n - 1];
    let residual = strong_residual(grid, &phi, &rho, PoissonBoundary::FreeSpace);
    Ok(PoissonSolution { phi: Field::from_vec_unchecked(grid.clone(), phi), grad_energy, coupling, iterations: 0, residual })
}

/// The two potential bounds for `(u, phi_u)`:
/// `|grad phi|_2 <= s0^{-1/2} |u|_{12/5}^2` and `int phi u^2 <= s0^{-1} |u|_{12/5}^4`.
pub fn potential_bounds<T: Real>(u: &Field<T>, sol: &PoissonSolution<T>, s0: T) -> Result<[BoundCheck; 2]> {
    let l = to_f64(lq_norm(u, lit(12.0 / 5.0))?);
    let s0 = to_f64(s0);
    let tol = 1e-10;
    let g = to_f64(sol.grad_energy).max(0.0).sqrt();
    let c = to_f64(sol.coupling);
    let a = BoundCheck::upper("potential_gradient_bound", g, l * l / s0.sqrt(), tol * (1.0 + l * l));
    let b = BoundCheck::upper("potential_coupling_bound", c, l.powi(4) / s0, tol * (1.0 + l.powi(4)));
    Ok([a, b])
}

/// `int |grad u|^2 / (int u^6)^{1/3}` for a field vanishing on the Dirichlet layer.
pub fn sobolev_quotient<T: Real>(u: &Field<T>) -> Result<T> {
    let grid = u.grid();
    let num = grid.grad_pairing(u.values(), u.values());
    let six = lq_norm(u, lit(6.0))?;
    if six == T::zero() {
        return Err(Error::InvalidInput("Sobolev quotient of the zero field".into()));
    }
    Ok(num / (six * six))
}

/// Estimate of the `D^{1,2}` Sobolev constant from the Aubin–Talenti profile
/// `(1 + |x/sigma|^2)^{-1/2}`, shifted to vanish at `r = k`. The scale `sigma` balances the
/// truncation error (`~ sigma/k`) against the resolution error (`~ (h/sigma)^2`).
pub fn estimate_s0<T: Real>(grid: &std::sync::Arc<Grid<T>>) -> Result<T> {
    if grid.kind() != GridKind::Radial {
        return Err(Error::NotRadial);
    }
    let k = grid.k();
    let h = grid.h();
    let sigma = (k * h * h).cbrt().max(h * lit(4.0)).min(k / lit(20.0));
    let profile = |r: T| (T::one() + (r / sigma) * (r / sigma)).sqrt().recip();
    let edge = profile(k);
    let u = Field::radial_fn(grid.clone(), |r| (profile(r) - edge).max(T::zero())).with_dirichlet();
    sobolev_quotient(&u)
}

/// Sharp value `3 (pi/2)^{4/3}` of the `D^{1,2}` Sobolev constant in three dimensions.
pub fn sharp_s0() -> f64 {
    3.0 * (std::f64::consts::PI / 2.0).powf(4.0 / 3.0)
}
