use crate::discretization::{Field, GridKind};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::poisson::{potential, PoissonBoundary};
use crate::real::Real;
use crate::wells::Well;

/// `L^2` norm, over the interior nodes of `Omega0`, of the strong residual of the limit problem
/// `-Delta u + u + lambda (u^2 * 1/(4 pi |x|)) u = |u|^{p-1} u`, evaluated on `u` masked to
/// `Omega0`. A node is interior when it and all its stencil neighbours lie in `Omega0`.
pub fn limit_problem_residual<T: Real>(u: &Field<T>, well: &Well, params: &Params<T>) -> Result<T> {
    let grid = u.grid();
    well.check_inside(grid)?;
    let g = well.sample(grid)?;
    let inside: Vec<bool> = (0..grid.len()).map(|i| grid.is_free(i) && g[i] == T::zero()).collect();
    let masked: Vec<T> = u.values().iter().zip(&inside).map(|(&v, &m)| if m { v } else { T::zero() }).collect();

    let neighbours_inside = |i: usize| -> bool {
        match grid.kind() {
            GridKind::Radial => (i == 0 || inside[i - 1]) && i + 1 < grid.len() && inside[i + 1],
            GridKind::Box3d => {
                let n = grid.n();
                [1, n, n * n].iter().all(|&st| i >= st && i + st < grid.len() && inside[i - st] && inside[i + st])
            }
        }
    };
    let interior: Vec<usize> = (0..grid.len()).filter(|&i| inside[i] && neighbours_inside(i)).collect();
    if interior.is_empty() {
        return Err(Error::Unresolved("no grid node has its whole stencil inside Omega0".into()));
    }

    let rho: Vec<T> = masked.iter().map(|&v| v * v).collect();
    let (phi, _) = potential(grid, &rho, PoissonBoundary::FreeSpace)?;
    let lap = grid.neg_laplacian(&masked);
    let w = grid.weights();
    let pm1 = params.p - T::one();
    let mut s = T::zero();
    for &i in &interior {
        let v = masked[i];
        let r = lap[i] + v + params.lambda * phi[i] * v - v.abs().powf(pm1) * v;
        s += w[i] * r * r;
    }
    Ok(s.sqrt())
}
