use std::sync::Arc;

use serde::Serialize;

use crate::discretization::{power_integral, Field, Grid};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::poisson::{self, PoissonBoundary, POISSON_TOL};
use crate::real::{dot, lit, Real};
use crate::wells::Well;

/// Parts of `I(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown<T> {
    /// `1/2 int |grad u|^2 + V_mu u^2`.
    pub kinetic: T,
    /// `lambda/4 int phi_u u^2`.
    pub hartree: T,
    /// `1/(p+1) int |u|^{p+1}`.
    pub potential_power: T,
    pub total: T,
}

/// Strong-form Euler–Lagrange residual of `u`.
#[derive(Debug, Clone)]
pub struct Residual<T> {
    /// `-Delta u + V_mu u + lambda phi_u u - |u|^{p-1} u` on the free nodes, zero elsewhere.
    pub field: Field<T>,
    /// Discrete `L^2` norm of `field`.
    pub norm_l2: T,
    /// Norm of `I'(u)` in the dual of `(D, <.,.>_V)`.
    pub norm_dual: T,
    /// `<u,u>_V + lambda int phi_u u^2 - int |u|^{p+1}`.
    pub nehari_gap: T,
}

/// Coefficients of `t -> I(t v) = a t^2/2 + lambda b t^4/4 - c t^{p+1}/(p+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fibering<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub p: T,
    pub lambda: T,
}

impl<T: Real> Fibering<T> {
    pub fn value(&self, t: T) -> T {
        let (two, four) = (lit::<T>(2.0), lit::<T>(4.0));
        let q = self.p + T::one();
        self.a * t * t / two + self.lambda * self.b * t.powi(4) / four - self.c * t.abs().powf(q) / q
    }

    /// `h(t) = f'(t)/t`.
    fn h(&self, t: T) -> T {
        self.a + self.lambda * self.b * t * t - self.c * t.powf(self.p - T::one())
    }

    /// First local maximum of `t -> I(t v)` on `t > 0`, if the ray has one.
    pub fn first_peak(&self) -> Option<T> {
        let one = T::one();
        let three = lit::<T>(3.0);
        let lb = self.lambda * self.b;
        if !(self.a > T::zero()) || !(self.c > T::zero()) {
            return None;
        }
        if lb == T::zero() {
            return Some((self.a / self.c).powf(one / (self.p - one)));
        }
        if self.p == three {
            return if self.c > lb { Some((self.a / (self.c - lb)).sqrt()) } else { None };
        }
        let hi = if self.p < three {
            // h decreases up to t_m, then increases
            let tm = ((self.p - one) * self.c / (lit::<T>(2.0) * lb)).powf(one / (three - self.p));
            if self.h(tm) >= T::zero() {
                return None;
            }
            tm
        } else {
            let mut hi = one;
            while self.h(hi) > T::zero() {
                hi *= lit(2.0);
                if !hi.is_finite() {
                    return None;
                }
            }
            hi
        };
        let mut lo = T::zero();
        let mut hi = hi;
        for _ in 0..200 {
            let mid = (lo + hi) / lit(2.0);
            if self.h(mid) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= T::epsilon() * hi {
                break;
            }
        }
        Some((lo + hi) / lit(2.0))
    }

    /// `max_{t in [0, 1]} I(t v)` and its argument.
    pub fn max_on_unit_interval(&self) -> (T, T) {
        let mut best = (self.value(T::one()), T::one());
        if self.value(T::zero()) > best.0 {
            best = (T::zero(), T::zero());
        }
        if let Some(t) = self.first_peak() {
            if t <= T::one() && self.value(t) > best.0 {
                best = (self.value(t), t);
            }
        }
        best
    }
}

/// `I_k` (or `I` with the free-space potential) on a fixed grid, well and parameter set.
#[derive(Debug, Clone)]
pub struct Functional<T> {
    grid: Arc<Grid<T>>,
    params: Params<T>,
    well: Well,
    pot: Vec<T>,
    boundary: PoissonBoundary,
}

impl<T: Real> Functional<T> {
    pub fn new(grid: &Arc<Grid<T>>, well: &Well, params: &Params<T>) -> Result<Self> {
        params.validate()?;
        well.validate()?;
        well.check_inside(grid)?;
        let pot = well.potential(grid, params.mu)?;
        Ok(Self { grid: grid.clone(), params: *params, well: well.clone(), pot, boundary: PoissonBoundary::Dirichlet })
    }

    pub fn with_boundary(mut self, boundary: PoissonBoundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }
    pub fn params(&self) -> &Params<T> {
        &self.params
    }
    pub fn well(&self) -> &Well {
        &self.well
    }
    pub fn boundary(&self) -> PoissonBoundary {
        self.boundary
    }
    /// Nodal `V_mu`.
    pub fn potential(&self) -> &[T] {
        &self.pot
    }

    pub(crate) fn check(&self, u: &Field<T>) -> Result<()> {
        if Arc::ptr_eq(u.grid(), &self.grid) || u.grid().same_as(&self.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Values with the Dirichlet layer zeroed.
    pub(crate) fn clean(&self, u: &[T]) -> Vec<T> {
        u.iter().zip(self.grid.free()).map(|(&v, &f)| if f { v } else { T::zero() }).collect()
    }

    /// `phi_u` for the configured boundary.
    pub fn phi(&self, u: &[T]) -> Result<Vec<T>> {
        let rho: Vec<T> = u.iter().map(|&v| v * v).collect();
        Ok(poisson::potential(&self.grid, &rho, self.boundary)?.0)
    }

    /// `phi_u`, skipped (zero) when `lambda = 0` since it does not enter `I` then.
    pub(crate) fn phi_if_needed(&self, u: &[T]) -> Result<Vec<T>> {
        if self.params.lambda == T::zero() {
            Ok(vec![T::zero(); u.len()])
        } else {
            self.phi(u)
        }
    }

    /// Potential of an arbitrary density (linear in `rho`).
    pub(crate) fn poisson_inverse(&self, rho: &[T]) -> Result<Vec<T>> {
        Ok(poisson::potential(&self.grid, rho, self.boundary)?.0)
    }

    /// `(<u,u>_V, int phi u^2, int |u|^{p+1})`.
    pub(crate) fn parts(&self, u: &[T], phi: &[T]) -> (T, T, T) {
        let w = self.grid.weights();
        let a = crate::discretization::dv_inner_with(u, u, &self.grid, &self.pot);
        let b: T = (0..u.len()).map(|i| w[i] * phi[i] * u[i] * u[i]).sum();
        let c = power_integral(u, w, self.params.p + T::one());
        (a, b, c)
    }

    pub(crate) fn breakdown(&self, u: &[T], phi: &[T]) -> EnergyBreakdown<T> {
        let (a, b, c) = self.parts(u, phi);
        let kinetic = a / lit(2.0);
        let hartree = self.params.lambda * b / lit(4.0);
        let potential_power = c / (self.params.p + T::one());
        EnergyBreakdown { kinetic, hartree, potential_power, total: kinetic + hartree - potential_power }
    }

    pub fn energy(&self, u: &Field<T>) -> Result<EnergyBreakdown<T>> {
        self.check(u)?;
        let v = self.clean(u.values());
        let phi = self.phi_if_needed(&v)?;
        Ok(self.breakdown(&v, &phi))
    }

    /// `I(u)` from raw values.
    pub(crate) fn value(&self, u: &[T]) -> Result<T> {
        let phi = self.phi_if_needed(u)?;
        Ok(self.breakdown(u, &phi).total)
    }

    /// Euclidean gradient of the discrete functional: `L u + W (V + lambda phi) u - W |u|^{p-1} u`.
    pub(crate) fn gradient(&self, u: &[T], phi: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); u.len()];
        self.grid.apply_stiffness(u, &mut g);
        let w = self.grid.weights();
        let pm1 = self.params.p - T::one();
        let lam = self.params.lambda;
        for i in 0..u.len() {
            if self.grid.is_free(i) {
                let ui = u[i];
                g[i] += w[i] * ((self.pot[i] + lam * phi[i]) * ui - ui.abs().powf(pm1) * ui);
            } else {
                g[i] = T::zero();
            }
        }
        g
    }

    /// Solves `(L + W V) x = rhs`: the Riesz map of the `D_V` inner product.
    pub(crate) fn gram_solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        Ok(self.grid.solve_shifted(&self.pot, rhs, lit(POISSON_TOL))?.0)
    }

    /// Sobolev gradient `A^{-1} g` and the dual norm `sqrt(g^T A^{-1} g)`.
    pub(crate) fn sobolev_gradient(&self, g: &[T]) -> Result<(Vec<T>, T)> {
        let s = self.gram_solve(g)?;
        let n2 = dot(g, &s).max(T::zero());
        Ok((s, n2.sqrt()))
    }

    pub fn residual(&self, u: &Field<T>) -> Result<Residual<T>> {
        self.check(u)?;
        let v = self.clean(u.values());
        let phi = self.phi_if_needed(&v)?;
        self.residual_with(&v, &phi)
    }

    pub(crate) fn residual_with(&self, u: &[T], phi: &[T]) -> Result<Residual<T>> {
        let g = self.gradient(u, phi);
        let w = self.grid.weights();
        let strong: Vec<T> = (0..g.len()).map(|i| if self.grid.is_free(i) { g[i] / w[i] } else { T::zero() }).collect();
        let norm_l2 = (0..g.len()).map(|i| w[i] * strong[i] * strong[i]).sum::<T>().sqrt();
        let (_, norm_dual) = self.sobolev_gradient(&g)?;
        let (a, b, c) = self.parts(u, phi);
        Ok(Residual {
            field: Field::from_vec_unchecked(self.grid.clone(), strong),
            norm_l2,
            norm_dual,
            nehari_gap: a + self.params.lambda * b - c,
        })
    }

    /// `J v` for the Jacobian of the Euclidean gradient, with the regularized derivative
    /// `p (u^2 + eps^2)^{(p-1)/2}` of `|u|^{p-1} u`.
    pub fn jacobian_apply(&self, u: &Field<T>, v: &Field<T>, eps: T) -> Result<Vec<T>> {
        self.check(u)?;
        self.check(v)?;
        let uu = self.clean(u.values());
        let phi = self.phi_if_needed(&uu)?;
        self.jacobian_apply_with(&uu, &phi, &self.clean(v.values()), eps)
    }

    pub(crate) fn jacobian_apply_with(&self, u: &[T], phi: &[T], v: &[T], eps: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); u.len()];
        self.grid.apply_stiffness(v, &mut out);
        let w = self.grid.weights();
        let lam = self.params.lambda;
        let psi = if lam == T::zero() {
            vec![T::zero(); u.len()]
        } else {
            let rho: Vec<T> = (0..u.len()).map(|i| lit::<T>(2.0) * u[i] * v[i]).collect();
            self.poisson_inverse(&rho)?
        };
        for i in 0..u.len() {
            if self.grid.is_free(i) {
                let d = self.nonlinear_derivative(u[i], eps);
                out[i] += w[i] * ((self.pot[i] + lam * phi[i] - d) * v[i] + lam * u[i] * psi[i]);
            } else {
                out[i] = T::zero();
            }
        }
        Ok(out)
    }

    #[inline]
    pub(crate) fn nonlinear_derivative(&self, u: T, eps: T) -> T {
        let p = self.params.p;
        p * (u * u + eps * eps).powf((p - T::one()) / lit(2.0))
    }

    /// Coefficients of the energy along the ray through `v`.
    pub fn fibering(&self, v: &Field<T>) -> Result<Fibering<T>> {
        self.check(v)?;
        let vv = self.clean(v.values());
        self.fibering_values(&vv)
    }

    pub(crate) fn fibering_values(&self, v: &[T]) -> Result<Fibering<T>> {
        let phi = self.phi_if_needed(v)?;
        let (a, b, c) = self.parts(v, &phi);
        Ok(Fibering { a, b, c, p: self.params.p, lambda: self.params.lambda })
    }

    /// `D_V` norm.
    pub fn norm(&self, u: &Field<T>) -> Result<T> {
        self.check(u)?;
        let v = self.clean(u.values());
        Ok(crate::discretization::dv_inner_with(&v, &v, &self.grid, &self.pot).max(T::zero()).sqrt())
    }

    pub(crate) fn norm_values(&self, u: &[T]) -> T {
        crate::discretization::dv_inner_with(u, u, &self.grid, &self.pot).max(T::zero()).sqrt()
    }
}

/// Energy of `u` on its grid with the Dirichlet potential.
pub fn energy<T: Real>(u: &Field<T>, params: &Params<T>, well: &Well) -> Result<EnergyBreakdown<T>> {
    Functional::new(u.grid(), well, params)?.energy(u)
}

/// Strong residual and Nehari gap of `u` with the Dirichlet potential.
pub fn residual<T: Real>(u: &Field<T>, params: &Params<T>, well: &Well) -> Result<Residual<T>> {
    Functional::new(u.grid(), well, params)?.residual(u)
}
