use crate::real::{dot, Real};

pub struct CgOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub rel_residual: T,
    pub converged: bool,
}

/// Jacobi-preconditioned conjugate gradient for an SPD operator. Fixed reduction order.
pub fn solve<T: Real, A: Fn(&[T], &mut [T])>(
    apply: A,
    diag: &[T],
    b: &[T],
    x0: Option<&[T]>,
    rel_tol: T,
    max_iter: usize,
) -> CgOutcome<T> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![T::zero(); n]);
    if bnorm == T::zero() {
        return CgOutcome { x: vec![T::zero(); n], iterations: 0, rel_residual: T::zero(), converged: true };
    }
    let mut r = vec![T::zero(); n];
    apply(&x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<T> = r.iter().zip(diag).map(|(&ri, &d)| ri / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    let mut res = dot(&r, &r).sqrt() / bnorm;
    let mut it = 0;
    while res > rel_tol && it < max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
        res = dot(&r, &r).sqrt() / bnorm;
    }
    CgOutcome { x, iterations: it, rel_residual: res, converged: res <= rel_tol }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_tridiagonal() {
        let n = 50;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let mut s = 4.0 * x[i];
                if i > 0 {
                    s -= x[i - 1];
                }
                if i + 1 < n {
                    s -= x[i + 1];
                }
                y[i] = s;
            }
        };
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let out = solve(apply, &vec![4.0; n], &b, None, 1e-12, 500);
        assert!(out.converged);
        let mut y = vec![0.0; n];
        apply(&out.x, &mut y);
        let err: f64 = y.iter().zip(&b).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}
