use serde::Serialize;

use super::BoundCheck;
use crate::discretization::{Field, GridKind};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::real::{to_f64, Real};

/// Result of fitting `u(r) <= A r^{-1/2} exp(-(sqrt(mu)/2)(r - R0))` on a radial profile.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub a: f64,
    /// Least-squares slope of `log(u sqrt(r))` against `r`.
    pub slope: f64,
    pub r0: f64,
    /// Fit window `(R0, k - 2]`.
    pub window: (f64, f64),
    /// Radius where `A` is attained.
    pub argmax_r: f64,
    pub check: BoundCheck,
}

/// Outer layer excluded from the fit; the Dirichlet condition steepens the tail there.
const OUTER_LAYER: f64 = 2.0;

pub fn decay_fit<T: Real>(u: &Field<T>, params: &Params<T>, r0: T) -> Result<DecayFit> {
    let grid = u.grid();
    if grid.kind() != GridKind::Radial {
        return Err(Error::NotRadial);
    }
    let k = to_f64(grid.k());
    let r0 = to_f64(r0);
    if !(r0 > 0.0) || k < 2.0 * r0 + 4.0 {
        return Err(Error::InvalidInput(format!("decay window too small: need k >= 2 R0 + 4 (k = {k}, R0 = {r0})")));
    }
    let hi = k - OUTER_LAYER;
    let rate = to_f64(params.mu).sqrt() / 2.0;
    let mut pts = Vec::new();
    for (&r, &v) in grid.radius().iter().zip(u.values()) {
        let (r, v) = (to_f64(r), to_f64(v));
        if r > r0 && r <= hi + 1e-12 * k {
            if !(v > 0.0) {
                return Err(Error::InvalidInput(format!("u is not positive in the decay window (u({r:.4}) = {v:.3e})")));
            }
            pts.push((r, v));
        }
    }
    if pts.len() < 5 {
        return Err(Error::InvalidInput(format!("decay window holds {} nodes", pts.len())));
    }
    let prod = |(r, v): (f64, f64)| v * r.sqrt() * (rate * (r - r0)).exp();
    let (mut a, mut arg) = (f64::NEG_INFINITY, 0.0);
    for &pt in &pts {
        let q = prod(pt);
        if q > a {
            a = q;
            arg = pt.0;
        }
    }
    // the supremum has to be reached before the last tenth of the window
    let cut = r0 + 0.9 * (hi - r0);
    let a_inner = pts.iter().filter(|p| p.0 <= cut).map(|&p| prod(p)).fold(f64::NEG_INFINITY, f64::max);
    let interior = a.is_finite() && a <= a_inner * (1.0 + 1e-6);

    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(sx, sy), &(r, v)| (sx + r, sy + (v * r.sqrt()).ln()));
    let (mx, my) = (sx / m, sy / m);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(r, v) in &pts {
        sxy += (r - mx) * ((v * r.sqrt()).ln() - my);
        sxx += (r - mx) * (r - mx);
    }
    let slope = sxy / sxx;
    let mut check = BoundCheck::upper("decay_slope", slope, -0.85 * rate, 0.0)
        .with_detail(format!("A = {a:.6e} at r = {arg:.4}, attained inside the window: {interior}"));
    check.pass &= interior;
    Ok(DecayFit { a, slope, r0, window: (r0, hi), argmax_r: arg, check })
}

/// `int_{|x| > R} |grad u|^2 + u^2`. Edges count when their midpoint lies beyond `R`.
pub fn tail_mass<T: Real>(u: &Field<T>, r_cut: T) -> Result<T> {
    let grid = u.grid();
    if !(r_cut >= T::zero() && r_cut < grid.k()) {
        return Err(Error::InvalidInput(format!("tail radius {r_cut} must lie in [0, k = {})", grid.k())));
    }
    let v = u.values();
    let w = grid.weights();
    let free = grid.free();
    let val = |i: usize| if free[i] { v[i] } else { T::zero() };
    let mut s = T::zero();
    for i in 0..v.len() {
        if grid.radius()[i] > r_cut {
            s += w[i] * v[i] * v[i];
        }
    }
    match grid.kind() {
        GridKind::Radial => {
            let a = grid.radial_edges();
            let h = grid.h();
            let half = T::one() / (T::one() + T::one());
            for e in 0..grid.n() - 1 {
                let mid = h * (T::from_usize(e).unwrap() + half);
                if mid > r_cut {
                    let d = val(e) - val(e + 1);
                    s += a[e] * d * d;
                }
            }
        }
        GridKind::Box3d => {
            let n = grid.n();
            let h = grid.h();
            let half = T::one() / (T::one() + T::one());
            for i in 0..v.len() {
                for st in [1, n, n * n] {
                    let j = i + st;
                    if j >= v.len() || !(free[i] || free[j]) {
                        continue;
                    }
                    let (xi, xj) = (grid.position(i), grid.position(j));
                    let mid = (0..3).map(|c| ((xi[c] + xj[c]) * half).powi(2)).fold(T::zero(), |a, b| a + b).sqrt();
                    if mid > r_cut {
                        let d = val(i) - val(j);
                        s += h * d * d;
                    }
                }
            }
        }
    }
    Ok(s)
}
