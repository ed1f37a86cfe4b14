use crate::real::{dot, Real};

pub struct GmresOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub rel_residual: T,
}

/// Flexible restarted GMRES (right preconditioning, the preconditioner may vary between
/// applications). Solves `A x = b` from `x = 0`.
pub fn fgmres<T, A, P>(apply: A, precond: P, b: &[T], rel_tol: T, restart: usize, max_iter: usize) -> GmresOutcome<T>
where
    T: Real,
    A: Fn(&[T], &mut [T]),
    P: Fn(&[T]) -> Vec<T>,
{
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![T::zero(); n];
    if bnorm == T::zero() {
        return GmresOutcome { x, iterations: 0, rel_residual: T::zero() };
    }
    let mut total = 0;
    let mut r = b.to_vec();
    let mut rel = T::one();
    let mut w = vec![T::zero(); n];
    while total < max_iter {
        let beta = dot(&r, &r).sqrt();
        rel = beta / bnorm;
        if rel <= rel_tol {
            break;
        }
        let mut v: Vec<Vec<T>> = vec![r.iter().map(|&ri| ri / beta).collect()];
        let mut z: Vec<Vec<T>> = Vec::new();
        let mut hcols: Vec<Vec<T>> = Vec::new();
        let mut cs: Vec<T> = Vec::new();
        let mut sn: Vec<T> = Vec::new();
        let mut g = vec![beta];
        for j in 0..restart {
            let zj = precond(&v[j]);
            apply(&zj, &mut w);
            z.push(zj);
            let mut h = vec![T::zero(); j + 2];
            for i in 0..=j {
                h[i] = dot(&w, &v[i]);
                let hi = h[i];
                for (wk, vk) in w.iter_mut().zip(&v[i]) {
                    *wk -= hi * *vk;
                }
            }
            // second Gram-Schmidt pass for orthogonality
            for i in 0..=j {
                let c = dot(&w, &v[i]);
                h[i] += c;
                for (wk, vk) in w.iter_mut().zip(&v[i]) {
                    *wk -= c * *vk;
                }
            }
            h[j + 1] = dot(&w, &w).sqrt();
            for i in 0..j {
                let t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            let denom = (h[j] * h[j] + h[j + 1] * h[j + 1]).sqrt();
            let (c, s) = if denom == T::zero() { (T::one(), T::zero()) } else { (h[j] / denom, h[j + 1] / denom) };
            let hnext = h[j + 1];
            h[j] = c * h[j] + s * h[j + 1];
            h[j + 1] = T::zero();
            cs.push(c);
            sn.push(s);
            g.push(-s * g[j]);
            g[j] = c * g[j];
            hcols.push(h);
            total += 1;
            rel = g[j + 1].abs() / bnorm;
            if rel <= rel_tol || total >= max_iter || hnext == T::zero() {
                break;
            }
            v.push(w.iter().map(|&wk| wk / hnext).collect());
        }
        let m = hcols.len();
        let mut y = vec![T::zero(); m];
        for i in (0..m).rev() {
            let mut s = g[i];
            for k in i + 1..m {
                s -= hcols[k][i] * y[k];
            }
            y[i] = s / hcols[i][i];
        }
        for (k, zk) in z.iter().enumerate() {
            for (xi, zi) in x.iter_mut().zip(zk) {
                *xi += y[k] * *zi;
            }
        }
        apply(&x, &mut w);
        for i in 0..n {
            r[i] = b[i] - w[i];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= rel_tol {
            break;
        }
    }
    GmresOutcome { x, iterations: total, rel_residual: rel }
}
