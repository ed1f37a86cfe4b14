use crate::real::Real;

/// LU factorisation with partial pivoting of a banded matrix with `kl` sub- and `ku`
/// super-diagonals. Row `r` stores absolute columns `r - kl ..= r + kl + ku`, which leaves
/// room for the fill-in produced by row interchanges.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![T::zero(); n * width], piv: Vec::new() }
    }

    #[inline]
    fn slot(&self, r: usize, c: usize) -> Option<usize> {
        let first = r as isize - self.kl as isize;
        let off = c as isize - first;
        if off < 0 || off >= self.width as isize {
            None
        } else {
            Some(r * self.width + off as usize)
        }
    }

    /// Adds `v` to entry `(r, c)`; panics if the entry lies outside the declared band.
    pub fn add(&mut self, r: usize, c: usize, v: T) {
        assert!(c + self.kl >= r && c <= r + self.ku, "entry ({r},{c}) outside band");
        let s = self.slot(r, c).expect("in band");
        self.data[s] += v;
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> T {
        self.slot(r, c).map(|s| self.data[s]).unwrap_or_else(T::zero)
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: T) {
        if let Some(s) = self.slot(r, c) {
            self.data[s] = v;
        }
    }

    /// In-place factorisation. Returns `false` on an exactly singular pivot.
    pub fn factor(&mut self) -> bool {
        let n = self.n;
        self.piv = (0..n).collect();
        for j in 0..n {
            let last = (j + self.kl).min(n - 1);
            let mut p = j;
            let mut best = self.get(j, j).abs();
            for r in j + 1..=last {
                let v = self.get(r, j).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return false;
            }
            if p != j {
                self.swap_rows(j, p);
                self.piv[j] = p;
            }
            let pivot = self.get(j, j);
            let cmax = (j + self.kl + self.ku).min(n - 1);
            for r in j + 1..=last {
                let a = self.get(r, j);
                if a == T::zero() {
                    continue;
                }
                let f = a / pivot;
                self.set(r, j, f);
                for c in j + 1..=cmax {
                    let v = self.get(r, c) - f * self.get(j, c);
                    self.set(r, c, v);
                }
            }
        }
        true
    }

    /// Interchanges columns `>= a` of rows `a < b`; earlier multipliers stay in place, matching
    /// the incremental pivot application in [`BandLu::solve`].
    fn swap_rows(&mut self, a: usize, b: usize) {
        let lo = a;
        let hi = (b + self.kl + self.ku).min(self.n - 1);
        let ra: Vec<T> = (lo..=hi).map(|c| self.get(a, c)).collect();
        let rb: Vec<T> = (lo..=hi).map(|c| self.get(b, c)).collect();
        for (i, c) in (lo..=hi).enumerate() {
            if let Some(s) = self.slot(a, c) {
                self.data[s] = rb[i];
            }
            if let Some(s) = self.slot(b, c) {
                self.data[s] = ra[i];
            }
        }
    }

    /// Solves `A x = b` with the stored factors.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x = b.to_vec();
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                x.swap(j, p);
            }
            let last = (j + self.kl).min(n - 1);
            for r in j + 1..=last {
                let f = self.get(r, j);
                if f != T::zero() {
                    let xj = x[j];
                    x[r] -= f * xj;
                }
            }
        }
        for j in (0..n).rev() {
            let cmax = (j + self.kl + self.ku).min(n - 1);
            let mut s = x[j];
            for c in j + 1..=cmax {
                s -= self.get(j, c) * x[c];
            }
            x[j] = s / self.get(j, j);
        }
        x
    }
}
