use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::real::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// Shells `r_i = i h`, `i = 0..n`, on `[0, k]`; the node at `r = k` is Dirichlet.
    Radial,
    /// Uniform nodes on the cube `[-k, k]^3`; nodes with `|x| >= k` are Dirichlet ghosts.
    Box3d,
}

/// Discrete approximation of the ball `B_k`.
///
/// Operators are built from edge differences so that the discrete Laplacian is the
/// exact adjoint of the discrete gradient with respect to the node weights.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    kind: GridKind,
    k: T,
    n: usize,
    h: T,
    radius: Vec<T>,
    weights: Vec<T>,
    free: Vec<bool>,
    /// Radial: `4 pi r_{i+1/2}^2 / h` for each edge. Box3d: unused.
    edge: Vec<T>,
}

pub(crate) const CG_MAX_ITER: usize = 20_000;

impl<T: Real> Grid<T> {
    pub fn radial(k: T, n: usize) -> Result<Self> {
        if !(k > T::zero() && k.is_finite()) {
            return Err(Error::InvalidInput(format!("radius k = {k} must be positive")));
        }
        if n < 3 {
            return Err(Error::InvalidInput(format!("radial grid needs n >= 3, got {n}")));
        }
        let h = k / lit(n as f64 - 1.0);
        let four_pi = lit::<T>(4.0) * T::PI();
        let radius: Vec<T> = (0..n).map(|i| h * lit(i as f64)).collect();
        let mut weights: Vec<T> = radius.iter().map(|&r| four_pi * r * r * h).collect();
        weights[0] = T::PI() * h * h * h / lit(6.0);
        weights[n - 1] /= lit(2.0);
        let edge = (0..n - 1)
            .map(|i| {
                let rm = h * (lit::<T>(i as f64) + lit(0.5));
                four_pi * rm * rm / h
            })
            .collect();
        let mut free = vec![true; n];
        free[n - 1] = false;
        Ok(Self { kind: GridKind::Radial, k, n, h, radius, weights, free, edge })
    }

    pub fn box3d(k: T, n: usize) -> Result<Self> {
        if !(k > T::zero() && k.is_finite()) {
            return Err(Error::InvalidInput(format!("radius k = {k} must be positive")));
        }
        if n < 5 {
            return Err(Error::InvalidInput(format!("box3d grid needs n >= 5, got {n}")));
        }
        let h = lit::<T>(2.0) * k / lit(n as f64 - 1.0);
        let len = n * n * n;
        let mut radius = Vec::with_capacity(len);
        let mut weights = Vec::with_capacity(len);
        let mut free = Vec::with_capacity(len);
        let vol = h * h * h;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let x = [coord(k, h, i), coord(k, h, j), coord(k, h, l)];
                    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                    let interior = [i, j, l].iter().all(|&a| a > 0 && a < n - 1);
                    let inside = interior && r < k;
                    radius.push(r);
                    weights.push(if inside { vol } else { T::zero() });
                    free.push(inside);
                }
            }
        }
        Ok(Self { kind: GridKind::Box3d, k, n, h, radius, weights, free, edge: Vec::new() })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }
    pub fn k(&self) -> T {
        self.k
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> T {
        self.h
    }
    /// Number of stored nodes (`n` or `n^3`).
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
    /// `|x|` for every node.
    pub fn radius(&self) -> &[T] {
        &self.radius
    }
    /// Quadrature weights; zero on box3d ghost nodes.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    /// Nodes carrying unknowns (everything except the Dirichlet layer).
    pub fn free(&self) -> &[bool] {
        &self.free
    }
    pub fn is_free(&self, i: usize) -> bool {
        self.free[i]
    }
    pub fn volume(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.kind == other.kind && self.n == other.n && self.k == other.k
    }

    /// Cartesian position of node `i`. Radial nodes are placed on the positive x axis.
    pub fn position(&self, i: usize) -> [T; 3] {
        match self.kind {
            GridKind::Radial => [self.radius[i], T::zero(), T::zero()],
            GridKind::Box3d => {
                let n = self.n;
                let (a, rem) = (i / (n * n), i % (n * n));
                let (b, c) = (rem / n, rem % n);
                [coord(self.k, self.h, a), coord(self.k, self.h, b), coord(self.k, self.h, c)]
            }
        }
    }

    pub(crate) fn radial_edges(&self) -> &[T] {
        &self.edge
    }

    /// `out = L u`, where `L` is the symmetric stiffness matrix. Dirichlet nodes read as zero
    /// and receive zero.
    pub fn apply_stiffness(&self, u: &[T], out: &mut [T]) {
        assert_eq!(u.len(), self.len());
        assert_eq!(out.len(), self.len());
        match self.kind {
            GridKind::Radial => {
                out.iter_mut().for_each(|o| *o = T::zero());
                let val = |i: usize| if self.free[i] { u[i] } else { T::zero() };
                for e in 0..self.n - 1 {
                    let d = self.edge[e] * (val(e) - val(e + 1));
                    out[e] += d;
                    out[e + 1] -= d;
                }
                for (o, &f) in out.iter_mut().zip(&self.free) {
                    if !f {
                        *o = T::zero();
                    }
                }
            }
            GridKind::Box3d => {
                let n = self.n;
                let strides = [1, n, n * n];
                let h = self.h;
                for i in 0..self.len() {
                    if !self.free[i] {
                        out[i] = T::zero();
                        continue;
                    }
                    let ui = u[i];
                    let mut s = T::zero();
                    for &st in &strides {
                        for j in [i - st, i + st] {
                            let uj = if self.free[j] { u[j] } else { T::zero() };
                            s += ui - uj;
                        }
                    }
                    out[i] = h * s;
                }
            }
        }
    }

    /// `sum_e a_e (D u)_e (D v)_e`, the discrete `int grad u . grad v`.
    pub fn grad_pairing(&self, u: &[T], v: &[T]) -> T {
        match self.kind {
            GridKind::Radial => {
                let fu = |i: usize| if self.free[i] { u[i] } else { T::zero() };
                let fv = |i: usize| if self.free[i] { v[i] } else { T::zero() };
                let mut s = T::zero();
                for e in 0..self.n - 1 {
                    s += self.edge[e] * (fu(e) - fu(e + 1)) * (fv(e) - fv(e + 1));
                }
                s
            }
            GridKind::Box3d => {
                let n = self.n;
                let strides = [1, n, n * n];
                let len = self.len();
                let mut s = T::zero();
                for i in 0..len {
                    for &st in &strides {
                        let j = i + st;
                        if j >= len || !(self.free[i] || self.free[j]) {
                            continue;
                        }
                        let du = self.val(u, i) - self.val(u, j);
                        let dv = self.val(v, i) - self.val(v, j);
                        s += du * dv;
                    }
                }
                s * self.h
            }
        }
    }

    #[inline]
    fn val(&self, u: &[T], i: usize) -> T {
        if self.free[i] {
            u[i]
        } else {
            T::zero()
        }
    }

    /// Strong-form `-Delta_h u` (stiffness divided by the node weight), zero on Dirichlet nodes.
    pub fn neg_laplacian(&self, u: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.len()];
        self.apply_stiffness(u, &mut out);
        for (i, o) in out.iter_mut().enumerate() {
            if self.free[i] {
                *o /= self.weights[i];
            }
        }
        out
    }

    /// Solves `(L + W diag(shift)) x = rhs` on the free nodes. `shift >= 0`.
    ///
    /// Radial grids use a tridiagonal direct solve; box3d uses Jacobi-preconditioned CG.
    /// Returns the solution and the iteration count.
    pub fn solve_shifted(&self, shift: &[T], rhs: &[T], rel_tol: T) -> Result<(Vec<T>, usize)> {
        assert_eq!(shift.len(), self.len());
        assert_eq!(rhs.len(), self.len());
        match self.kind {
            GridKind::Radial => {
                let m = self.n - 1;
                let mut lower = vec![T::zero(); m];
                let mut diag = vec![T::zero(); m];
                let mut upper = vec![T::zero(); m];
                for i in 0..m {
                    let mut d = self.edge[i] + self.weights[i] * shift[i];
                    if i > 0 {
                        d += self.edge[i - 1];
                        lower[i] = -self.edge[i - 1];
                    }
                    if i + 1 < m {
                        upper[i] = -self.edge[i];
                    }
                    diag[i] = d;
                }
                let mut x = linalg::tridiag::solve(&lower, &diag, &upper, &rhs[..m])
                    .ok_or(Error::Singular("radial shifted stiffness"))?;
                x.push(T::zero());
                Ok((x, 1))
            }
            GridKind::Box3d => {
                let diag: Vec<T> = (0..self.len())
                    .map(|i| {
                        if self.free[i] {
                            lit::<T>(6.0) * self.h + self.weights[i] * shift[i]
                        } else {
                            T::one()
                        }
                    })
                    .collect();
                let b: Vec<T> =
                    rhs.iter().zip(&self.free).map(|(&r, &f)| if f { r } else { T::zero() }).collect();
                let apply = |x: &[T], y: &mut [T]| {
                    self.apply_stiffness(x, y);
                    for i in 0..y.len() {
                        if self.free[i] {
                            y[i] += self.weights[i] * shift[i] * x[i];
                        }
                    }
                };
                let tol = rel_tol.max(T::solve_floor());
                let out = linalg::cg::solve(apply, &diag, &b, None, tol, CG_MAX_ITER);
                if !out.converged {
                    return Err(Error::NoConvergence {
                        what: "conjugate gradient",
                        iterations: out.iterations,
                        residual: crate::real::to_f64(out.rel_residual),
                    });
                }
                Ok((out.x, out.iterations))
            }
        }
    }
}

#[inline]
fn coord<T: Real>(k: T, h: T, i: usize) -> T {
    -k + h * lit(i as f64)
}
