use serde::Serialize;

use super::moser::{moser_constants, MoserConstants};
use crate::params::{Params, Regime};
use crate::real::{lit, Real};

/// Every closed-form constant available for `params`. Entries outside their regime are `None`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantSet<T> {
    pub p: T,
    pub lambda: T,
    /// `(p-1)(2-p)^{(2-p)/(p-1)}`.
    pub c_p: Option<T>,
    /// `C_{p,lambda}` in product form.
    pub big_c_product: Option<T>,
    /// `C_{p,lambda}` as the maximum of `t^p - (lambda/c_p) t^2`.
    pub big_c_max: Option<T>,
    /// `|product - max| / max`.
    pub big_c_gap: Option<T>,
    /// Nonexistence threshold `c(p) = c_p^2 / 4`.
    pub c_of_p: Option<T>,
    /// `C_{p,lambda}^{p-1} - 1`.
    pub mu1: Option<T>,
    /// `max{0, M0^{p-1} - 1}`; needs `M0`.
    pub mu2: Option<T>,
    /// Decay threshold; needs `M0` (and `C_{p,lambda}` when subquadratic).
    pub mu0: Option<T>,
    pub m0: Option<T>,
    pub moser: MoserConstants<T>,
}

pub fn c_p<T: Real>(p: T) -> Option<T> {
    if !(p > T::one() && p < lit(2.0)) {
        return None;
    }
    let two = lit::<T>(2.0);
    Some((p - T::one()) * (two - p).powf((two - p) / (p - T::one())))
}

/// `c(p) = (p-1)^2 (2-p)^{2(2-p)/(p-1)} / 4`.
pub fn c_of_p<T: Real>(p: T) -> Option<T> {
    c_p(p).map(|c| c * c / lit(4.0))
}

/// `2^{2/(p-2)} (2-p)^{(2p-1)/(p-1)} [p(p-1)/lambda]^{p/(2-p)}`.
pub fn big_c_product<T: Real>(p: T, lambda: T) -> Option<T> {
    if c_p(p).is_none() || !(lambda > T::zero()) {
        return None;
    }
    let one = T::one();
    let two = lit::<T>(2.0);
    let a = two.powf(two / (p - two));
    let b = (two - p).powf((two * p - one) / (p - one));
    let c = (p * (p - one) / lambda).powf(p / (two - p));
    Some(a * b * c)
}

/// `(2-p)/2 * (p c_p / (2 lambda))^{p/(2-p)}`, the maximum of `t^p - (lambda/c_p) t^2`.
pub fn big_c_max<T: Real>(p: T, lambda: T) -> Option<T> {
    let cp = c_p(p)?;
    if !(lambda > T::zero()) {
        return None;
    }
    let two = lit::<T>(2.0);
    Some((two - p) / two * (p * cp / (two * lambda)).powf(p / (two - p)))
}

pub fn constants<T: Real>(params: &Params<T>) -> ConstantSet<T> {
    constants_with_m0(params, None)
}

/// Same as [`constants`], also filling the thresholds that depend on the sup bound `M0`.
pub fn constants_with_m0<T: Real>(params: &Params<T>, m0: Option<T>) -> ConstantSet<T> {
    let (p, lambda) = (params.p, params.lambda);
    let one = T::one();
    let three = lit::<T>(3.0);
    let th = big_c_product(p, lambda);
    let le = big_c_max(p, lambda);
    let gap = match (th, le) {
        (Some(a), Some(b)) => Some((a - b).abs() / b.abs()),
        _ => None,
    };
    let mu1 = le.map(|c| c.powf(p - one) - one);
    let mu2 = m0.map(|m| (m.powf(p - one) - one).max(T::zero()));
    let mu0 = m0.and_then(|m| {
        let from_m = three * m.powf(p - one) - three;
        match params.regime() {
            Regime::Subquadratic => le.map(|c| (three * c.powf(p - one) - three).max(from_m)),
            Regime::Supercubic => Some(from_m),
            Regime::Intermediate => None,
        }
    });
    ConstantSet {
        p,
        lambda,
        c_p: c_p(p),
        big_c_product: th,
        big_c_max: le,
        big_c_gap: gap,
        c_of_p: c_of_p(p),
        mu1,
        mu2,
        mu0,
        m0,
        moser: moser_constants(p, lit(crate::poisson::sharp_s0())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spot_values() {
        assert_eq!(c_p(1.5_f64), Some(0.25));
        assert_eq!(c_of_p(1.5_f64), Some(0.015625));
        let exact: f64 = 421875.0 / 256.0;
        assert_relative_eq!(big_c_max(1.5, 0.01).unwrap(), exact, max_relative = 1e-12);
        assert_relative_eq!(big_c_product(1.5, 0.01).unwrap(), exact, max_relative = 1e-12);
        let set = constants(&Params::<f64>::new(1.5, 0.01, 100.0).unwrap());
        assert_relative_eq!(set.mu1.unwrap(), exact.sqrt() - 1.0, max_relative = 1e-12);
        assert!((set.mu1.unwrap() - 39.595).abs() < 1e-3);
    }

    #[test]
    fn regime_gating() {
        let set = constants(&Params::new(3.0, 1.0, 50.0).unwrap());
        assert!(set.c_p.is_none() && set.big_c_max.is_none() && set.mu1.is_none() && set.mu0.is_none());
        let set = constants_with_m0(&Params::new(3.0, 1.0, 50.0).unwrap(), Some(2.0));
        assert_relative_eq!(set.mu0.unwrap(), 9.0);
        assert_relative_eq!(set.mu2.unwrap(), 3.0);
        assert!(big_c_max(1.5_f64, 0.0).is_none());
    }

    #[test]
    fn two_forms_agree_and_exceed_one_below_threshold() {
        for i in 0..50 {
            // p up to 1.98; beyond that C overflows f64 for small lambda
            let p = 1.0 + (i as f64 + 1.0) / 51.0;
            let cop = c_of_p(p).unwrap();
            for j in 1..=50 {
                let lambda = cop * j as f64 / 50.0;
                let a = big_c_product(p, lambda).unwrap();
                let b = big_c_max(p, lambda).unwrap();
                assert!((a - b).abs() <= 1e-12 * b, "p={p} lambda={lambda}: {a} vs {b}");
                if j < 50 {
                    assert!(b > 1.0);
                }
            }
        }
    }

    #[test]
    fn big_c_is_the_maximum_of_the_scalar_profile() {
        // golden-section oracle for max_t (t^p - (lambda/c_p) t^2)
        for &(p, lambda) in &[(1.5, 0.01), (1.2, 0.003), (1.8, 0.0005)] {
            let cp = c_p(p).unwrap();
            let f = |t: f64| t.powf(p) - lambda / cp * t * t;
            let (mut a, mut b) = (0.0_f64, 1.0_f64);
            while f(b) > 0.0 || f(b) > f(b / 2.0) {
                b *= 2.0;
            }
            let g = (5.0_f64.sqrt() - 1.0) / 2.0;
            for _ in 0..300 {
                let c = b - g * (b - a);
                let d = a + g * (b - a);
                if f(c) > f(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            let oracle = f(0.5 * (a + b));
            assert_relative_eq!(big_c_max(p, lambda).unwrap(), oracle, max_relative = 1e-10);
        }
    }

    #[test]
    fn scalar_inequality_behind_pointwise_bound() {
        for i in 1..20 {
            let p = 1.0 + i as f64 / 20.0;
            let cp = c_p(p).unwrap();
            for j in 0..=10_000 {
                let t = 100.0 * j as f64 / 10_000.0;
                assert!(t + cp * t * t - t.powf(p) >= -1e-12, "p={p} t={t}");
            }
        }
    }

    #[test]
    fn f32_path() {
        let c: f32 = big_c_max(1.5_f32, 0.01).unwrap();
        assert!((c - 1647.949).abs() < 0.01);
    }
}
