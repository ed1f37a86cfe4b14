//! Potential wells `g` with explicit zero set `Omega0`, entering as `V_mu = 1 + mu g`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::discretization::{Field, Grid, GridKind};
use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 3],
    pub radius: f64,
}

impl Ball {
    fn dist(&self, x: [f64; 3]) -> f64 {
        (norm(sub(x, self.center)) - self.radius).max(0.0)
    }
}

/// Shape of the zero set `Omega0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Omega0 {
    Ball { center: [f64; 3], radius: f64 },
    /// Axis-aligned ellipsoid.
    Ellipsoid { center: [f64; 3], semi_axes: [f64; 3] },
    UnionOfBalls { balls: Vec<Ball> },
}

/// `g(x) = plateau * min(1, dist(x, Omega0) / tau)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Well {
    pub omega0: Omega0,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_plateau")]
    pub plateau: f64,
}

fn default_tau() -> f64 {
    0.25
}

fn default_plateau() -> f64 {
    1.0
}

impl Well {
    pub fn new(omega0: Omega0, tau: f64) -> Result<Self> {
        let w = Self { omega0, tau, plateau: 1.0 };
        w.validate()?;
        Ok(w)
    }

    /// `Omega0` = ball of radius `radius` centred at the origin.
    pub fn centered_ball(radius: f64) -> Self {
        Self { omega0: Omega0::Ball { center: [0.0; 3], radius }, tau: default_tau(), plateau: 1.0 }
    }

    /// Two balls of radius 0.5 at `(+-0.6, 0, 0)`.
    pub fn default_nonradial() -> Self {
        let b = |x: f64| Ball { center: [x, 0.0, 0.0], radius: 0.5 };
        Self { omega0: Omega0::UnionOfBalls { balls: vec![b(-0.6), b(0.6)] }, tau: default_tau(), plateau: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidInput(format!("ramp width tau = {} must be positive", self.tau)));
        }
        if !(self.plateau > 0.0 && self.plateau.is_finite()) {
            return Err(Error::InvalidInput(format!("plateau = {} must be positive", self.plateau)));
        }
        let ok = match &self.omega0 {
            Omega0::Ball { radius, .. } => *radius > 0.0,
            Omega0::Ellipsoid { semi_axes, .. } => semi_axes.iter().all(|&a| a > 0.0),
            Omega0::UnionOfBalls { balls } => !balls.is_empty() && balls.iter().all(|b| b.radius > 0.0),
        };
        if !ok {
            return Err(Error::InvalidInput("Omega0 must have nonempty interior".into()));
        }
        Ok(())
    }

    /// Distance from `x` to `Omega0` (zero inside).
    pub fn distance(&self, x: [f64; 3]) -> f64 {
        match &self.omega0 {
            Omega0::Ball { center, radius } => Ball { center: *center, radius: *radius }.dist(x),
            Omega0::Ellipsoid { center, semi_axes } => ellipsoid_distance(sub(x, *center), *semi_axes),
            Omega0::UnionOfBalls { balls } => balls.iter().map(|b| b.dist(x)).fold(f64::INFINITY, f64::min),
        }
    }

    /// `g(x)`.
    pub fn value(&self, x: [f64; 3]) -> f64 {
        self.plateau * (self.distance(x) / self.tau).min(1.0)
    }

    /// `true` when `g` depends on `|x|` only.
    pub fn is_radial(&self) -> bool {
        match &self.omega0 {
            Omega0::Ball { center, .. } => norm(*center) == 0.0,
            Omega0::Ellipsoid { center, semi_axes } => {
                norm(*center) == 0.0 && semi_axes[0] == semi_axes[1] && semi_axes[1] == semi_axes[2]
            }
            Omega0::UnionOfBalls { balls } => balls.len() == 1 && norm(balls[0].center) == 0.0,
        }
    }

    /// Radius of the smallest origin-centred ball containing `Omega0`.
    pub fn extent(&self) -> f64 {
        match &self.omega0 {
            Omega0::Ball { center, radius } => norm(*center) + radius,
            Omega0::Ellipsoid { center, semi_axes } => norm(*center) + semi_axes.iter().cloned().fold(0.0, f64::max),
            Omega0::UnionOfBalls { balls } => balls.iter().map(|b| norm(b.center) + b.radius).fold(0.0, f64::max),
        }
    }

    /// A ball `B_eps0(x0)` contained in `Omega0` (the largest one among the simple candidates).
    pub fn inscribed_ball(&self) -> Ball {
        match &self.omega0 {
            Omega0::Ball { center, radius } => Ball { center: *center, radius: *radius },
            Omega0::Ellipsoid { center, semi_axes } => {
                Ball { center: *center, radius: semi_axes.iter().cloned().fold(f64::INFINITY, f64::min) }
            }
            Omega0::UnionOfBalls { balls } => {
                let mut best = balls[0].clone();
                for b in balls {
                    if b.radius > best.radius {
                        best = b.clone();
                    }
                }
                best
            }
        }
    }

    /// Nodal values of `g`. Radial grids require a radial well.
    pub fn sample<T: Real>(&self, grid: &Grid<T>) -> Result<Vec<T>> {
        if grid.kind() == GridKind::Radial && !self.is_radial() {
            return Err(Error::InvalidInput("radial grid requires a well centred at the origin".into()));
        }
        Ok((0..grid.len())
            .map(|i| {
                let x = grid.position(i);
                lit(self.value([to_f64(x[0]), to_f64(x[1]), to_f64(x[2])]))
            })
            .collect())
    }

    /// Nodal values of `V_mu = 1 + mu g`.
    pub fn potential<T: Real>(&self, grid: &Grid<T>, mu: T) -> Result<Vec<T>> {
        Ok(self.sample(grid)?.into_iter().map(|g| T::one() + mu * g).collect())
    }

    /// Fails when `Omega0` is not inside `B_k`.
    pub fn check_inside<T: Real>(&self, grid: &Grid<T>) -> Result<()> {
        if self.extent() >= to_f64(grid.k()) {
            return Err(Error::InvalidInput(format!(
                "Omega0 (extent {}) is not contained in B_k with k = {}",
                self.extent(),
                grid.k()
            )));
        }
        Ok(())
    }
}

/// Point evaluation of `g`.
pub fn well_value(well: &Well, x: [f64; 3]) -> f64 {
    well.value(x)
}

/// Indicator field of `Omega0` on the free nodes of `grid`.
pub fn omega0_mask<T: Real>(well: &Well, grid: &Arc<Grid<T>>) -> Result<Field<T>> {
    well.check_inside(grid)?;
    let g = well.sample(grid)?;
    let vals = g
        .iter()
        .zip(grid.free())
        .map(|(&gi, &f)| if f && gi == T::zero() { T::one() } else { T::zero() })
        .collect();
    Field::new(grid.clone(), vals)
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Euclidean distance from `y` to the solid axis-aligned ellipsoid with semi-axes `e`.
fn ellipsoid_distance(y: [f64; 3], e: [f64; 3]) -> f64 {
    let z = [y[0].abs(), y[1].abs(), y[2].abs()];
    let level: f64 = (0..3).map(|i| (z[i] / e[i]).powi(2)).sum();
    if level <= 1.0 {
        return 0.0;
    }
    // closest point y_i = e_i^2 z_i / (t + e_i^2) with t > 0 the root of F(t) = 0
    let f = |t: f64| (0..3).map(|i| (e[i] * z[i] / (t + e[i] * e[i])).powi(2)).sum::<f64>() - 1.0;
    let emax = e.iter().cloned().fold(0.0, f64::max);
    let (mut lo, mut hi) = (0.0, emax * norm(z));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    let p: Vec<f64> = (0..3).map(|i| e[i] * e[i] * z[i] / (t + e[i] * e[i])).collect();
    ((z[0] - p[0]).powi(2) + (z[1] - p[1]).powi(2) + (z[2] - p[2]).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_values() {
        let w = Well::centered_ball(1.0);
        assert_eq!(w.value([0.0; 3]), 0.0);
        assert!((w.value([1.125, 0.0, 0.0]) - 0.5).abs() < 1e-15);
        assert_eq!(w.value([50.0, 3.0, -2.0]), 1.0);
    }

    #[test]
    fn ellipsoid_distance_along_axes() {
        let e = [1.0, 0.5, 0.5];
        assert!((ellipsoid_distance([2.0, 0.0, 0.0], e) - 1.0).abs() < 1e-12);
        assert!((ellipsoid_distance([0.0, 1.5, 0.0], e) - 1.0).abs() < 1e-12);
        assert_eq!(ellipsoid_distance([0.5, 0.1, 0.1], e), 0.0);
    }

    #[test]
    fn ellipsoid_distance_sphere_case() {
        let d = ellipsoid_distance([1.0, 1.0, 1.0], [0.5; 3]);
        assert!((d - (3f64.sqrt() - 0.5)).abs() < 1e-12);
    }
}
