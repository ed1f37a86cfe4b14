use std::sync::Arc;

use crate::discretization::{Field, Grid, GridKind};
use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Zero extension of `u` (on `B_k`) to a grid on `B_k'`, `k' >= k`: linear interpolation on
/// radial grids, trilinear on box grids, and zero outside `B_k`.
pub fn extend<T: Real>(u: &Field<T>, target: &Arc<Grid<T>>) -> Result<Field<T>> {
    let src = u.grid();
    if src.kind() != target.kind() {
        return Err(Error::InvalidInput("extend between different grid kinds".into()));
    }
    let k = src.k();
    if target.k() < k {
        return Err(Error::InvalidInput(format!("target radius {} < source radius {}", target.k(), k)));
    }
    let vals = u.values();
    let out: Vec<T> = match src.kind() {
        GridKind::Radial => target
            .radius()
            .iter()
            .map(|&r| if r >= k { T::zero() } else { interp_1d(vals, src.h(), r) })
            .collect(),
        GridKind::Box3d => (0..target.len())
            .map(|i| {
                if !target.is_free(i) || target.radius()[i] >= k {
                    T::zero()
                } else {
                    trilinear(u, target.position(i))
                }
            })
            .collect(),
    };
    Field::new(target.clone(), out)
}

fn interp_1d<T: Real>(vals: &[T], h: T, r: T) -> T {
    let s = r / h;
    let i = s.floor().to_usize().unwrap_or(0).min(vals.len() - 2);
    let t = s - lit(i as f64);
    vals[i] * (T::one() - t) + vals[i + 1] * t
}

fn trilinear<T: Real>(u: &Field<T>, x: [T; 3]) -> T {
    let g = u.grid();
    let n = g.n();
    let mut idx = [0usize; 3];
    let mut frac = [T::zero(); 3];
    for d in 0..3 {
        let s = (x[d] + g.k()) / g.h();
        let i = s.floor().max(T::zero()).to_usize().unwrap_or(0).min(n - 2);
        idx[d] = i;
        frac[d] = (s - lit(i as f64)).max(T::zero()).min(T::one());
    }
    let free = g.free();
    let vals = u.values();
    let mut acc = T::zero();
    for corner in 0..8 {
        let mut wgt = T::one();
        let mut off = [0usize; 3];
        for d in 0..3 {
            let bit = (corner >> d) & 1;
            off[d] = idx[d] + bit;
            wgt *= if bit == 1 { frac[d] } else { T::one() - frac[d] };
        }
        let j = (off[0] * n + off[1]) * n + off[2];
        if free[j] {
            acc += wgt * vals[j];
        }
    }
    acc
}
