use crate::real::Real;

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
/// `lower[0]` and `upper[m-1]` are ignored. Intended for diagonally dominant or SPD systems.
pub fn solve<T: Real>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Option<Vec<T>> {
    let m = diag.len();
    if m == 0 {
        return Some(Vec::new());
    }
    let mut c = vec![T::zero(); m];
    let mut d = vec![T::zero(); m];
    let mut beta = diag[0];
    if beta == T::zero() {
        return None;
    }
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..m {
        beta = diag[i] - lower[i] * c[i - 1];
        if beta == T::zero() || !beta.is_finite() {
            return None;
        }
        c[i] = if i + 1 < m { upper[i] / beta } else { T::zero() };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
    }
    for i in (0..m - 1).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    Some(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [1 0 1] -> x = [1 1 1]
        let x = solve(&[0.0, -1.0, -1.0], &[2.0, 2.0, 2.0], &[-1.0, -1.0, 0.0], &[1.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0f64).abs() < 1e-14);
        }
    }
}
