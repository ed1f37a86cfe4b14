use crate::discretization::Field;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::real::{lit, Real};
use crate::wells::Well;

/// `sum_i w_i f_i`.
pub fn integrate<T: Real>(f: &Field<T>) -> Result<T> {
    if f.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value in integrand".into()));
    }
    Ok(f.values().iter().zip(f.grid().weights()).map(|(&v, &w)| v * w).sum())
}

/// The `D_V` inner product `int grad u . grad v + V_mu u v`.
pub fn dv_inner<T: Real>(u: &Field<T>, v: &Field<T>, well: &Well, params: &Params<T>) -> Result<T> {
    u.check_same(v)?;
    let grid = u.grid();
    let pot = well.potential(grid, params.mu)?;
    Ok(dv_inner_with(u.values(), v.values(), grid, &pot))
}

pub(crate) fn dv_inner_with<T: Real>(u: &[T], v: &[T], grid: &crate::discretization::Grid<T>, pot: &[T]) -> T {
    let w = grid.weights();
    let free = grid.free();
    let mut mass = T::zero();
    for i in 0..u.len() {
        if free[i] {
            mass += w[i] * pot[i] * u[i] * v[i];
        }
    }
    grid.grad_pairing(u, v) + mass
}

/// `(int |u|^q)^{1/q}`.
pub fn lq_norm<T: Real>(u: &Field<T>, q: T) -> Result<T> {
    if !(q >= T::one()) {
        return Err(Error::InvalidInput(format!("lq_norm needs q >= 1, got {q}")));
    }
    let s: T = u
        .values()
        .iter()
        .zip(u.grid().weights())
        .map(|(&v, &w)| w * v.abs().powf(q))
        .sum();
    Ok(s.powf(T::one() / q))
}

/// `int |u|^q` without the root.
pub(crate) fn power_integral<T: Real>(u: &[T], w: &[T], q: T) -> T {
    u.iter().zip(w).map(|(&v, &wi)| wi * v.abs().powf(q)).sum()
}

/// Critical Sobolev exponent in three dimensions.
pub fn two_star<T: Real>() -> T {
    lit(6.0)
}
