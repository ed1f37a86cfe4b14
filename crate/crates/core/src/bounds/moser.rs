use serde::Serialize;

use super::BoundCheck;
use crate::discretization::{lq_norm, Field};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::real::{lit, to_f64, Real};

/// Constants of the three-dimensional Moser iteration for `-Delta u <= |u|^{p-1} u`.
#[derive(Debug, Clone, Serialize)]
pub struct MoserConstants<T> {
    pub beta0: T,
    /// `2 beta0 / (2 beta0^2 + 1 - p)`.
    pub delta: T,
    /// `(2* - p - 1) / 2*`.
    pub gamma: T,
    /// `(2 delta^2 - delta^3) / (1 - delta)^2`.
    pub f_inf: T,
    /// `delta^2 / (1 - delta)`.
    pub g_inf: T,
    /// Sobolev constant the chain was evaluated with.
    pub s0: T,
    /// `sqrt(68 / s0)`.
    pub c: T,
    pub c_bar: T,
    pub c_bar1: T,
    /// Starting radius at the reference norm `|u|_6 = 1`.
    pub r1: T,
    pub c1: T,
    pub c2: T,
}

fn ball_volume<T: Real>() -> T {
    lit::<T>(4.0 / 3.0) * T::PI()
}

/// `r1 = |B1|^{-1/3} (68 beta0^2 L^{p-1} + 1)^{-gamma/3}`.
fn r1<T: Real>(p: T, beta0: T, gamma: T, l: T) -> T {
    let third = lit::<T>(1.0 / 3.0);
    ball_volume::<T>().powf(-third) * (lit::<T>(68.0) * beta0 * beta0 * l.powf(p - T::one()) + T::one()).powf(-gamma * third)
}

pub fn moser_constants<T: Real>(p: T, s0: T) -> MoserConstants<T> {
    let one = T::one();
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let six = lit::<T>(6.0);
    let beta0 = three;
    let delta = two * beta0 / (two * beta0 * beta0 + one - p);
    let gamma = (six - p - one) / six;
    let om = one - delta;
    let f_inf = (two * delta * delta - delta * delta * delta) / (om * om);
    let g_inf = delta * delta / om;
    let c = (lit::<T>(68.0) / s0).sqrt();
    let e = g_inf + one / beta0;
    // C_bar absorbs 34 beta_i^2 [4/d_i^2 + (C beta0/(r1-r2))^{(p-1)/beta0} L^{p-1}] into
    // (C_bar beta_i (1 + L^{(p-1)/2}) / d_i)^2, using d_i <= r1/32 and r1 <= |B1|^{-1/3}.
    let rbar = ball_volume::<T>().powf(-one / three);
    let x = (rbar / lit(32.0)).powi(2) * (lit::<T>(16.0) * c * beta0 / (lit::<T>(7.0) * rbar)).powf((p - one) / beta0);
    let c_bar = (lit::<T>(34.0) * x.max(lit(4.0))).sqrt();
    let c_bar1 = c_bar / s0.sqrt();
    let k = lit::<T>(8.0) * c_bar1 + lit::<T>(16.0 / 7.0) * c * beta0;
    let c2 = e * ((p - one) / two + (p - one) * gamma / three);
    let c1 = (two / delta).powf(f_inf)
        * (ball_volume::<T>().powf(one / three) * k * two * (lit::<T>(69.0) * beta0 * beta0).powf(gamma / three)).powf(e);
    MoserConstants { beta0, delta, gamma, f_inf, g_inf, s0, c, c_bar, c_bar1, r1: r1(p, beta0, gamma, one), c1, c2 }
}

impl<T: Real> MoserConstants<T> {
    /// The iteration's final estimate before the `C1 (1 + L^{C2}) L` simplification.
    pub fn direct_bound(&self, p: T, l: T) -> T {
        let one = T::one();
        let two = lit::<T>(2.0);
        let e = self.g_inf + one / self.beta0;
        let k = lit::<T>(8.0) * self.c_bar1 + lit::<T>(16.0 / 7.0) * self.c * self.beta0;
        let r1 = r1(p, self.beta0, self.gamma, l);
        (two / self.delta).powf(self.f_inf) * (k * (one + l.powf((p - one) / two)) / r1).powf(e) * l
    }

    /// `C1 (1 + L^{C2}) L`.
    pub fn simplified_bound(&self, l: T) -> T {
        self.c1 * (T::one() + l.powf(self.c2)) * l
    }
}

/// The `r_i / beta_i` ladder run explicitly up to `i_max`.
#[derive(Debug, Clone, Serialize)]
pub struct MoserLadder {
    pub delta: f64,
    /// `r_i / r1 = (2 + 2^{-i}) / 4`, `i = 1..=i_max`.
    pub radii: Vec<f64>,
    /// `beta_i = delta^{-i}`.
    pub betas: Vec<f64>,
    /// Closed-form `f(i)`, `i = 2..=i_max`.
    pub f: Vec<f64>,
    /// Closed-form `g(i)`.
    pub g: Vec<f64>,
    /// Exponent of `2/delta` accumulated along the ladder, `sum_{l=2}^{i} l delta^l`.
    pub f_ladder: Vec<f64>,
    /// Exponent of `8/r1` accumulated along the ladder, `sum_{l=2}^{i} delta^l`.
    pub g_ladder: Vec<f64>,
    pub f_inf: f64,
    pub g_inf: f64,
}

pub fn moser_ladder(p: f64, i_max: usize) -> Result<MoserLadder> {
    if !(p > 1.0 && p < 5.0) || i_max < 2 {
        return Err(Error::InvalidInput(format!("moser ladder needs p in (1,5) and i_max >= 2 (p = {p}, i_max = {i_max})")));
    }
    let m = moser_constants(p, crate::poisson::sharp_s0());
    let d = m.delta;
    let om = 1.0 - d;
    let radii = (1..=i_max).map(|i| (2.0 + 0.5_f64.powi(i as i32)) / 4.0).collect();
    let betas = (1..=i_max).map(|i| d.powi(-(i as i32))).collect();
    let mut f = Vec::new();
    let mut g = Vec::new();
    let mut f_ladder = Vec::new();
    let mut g_ladder = Vec::new();
    let (mut fs, mut gs) = (0.0, 0.0);
    for i in 2..=i_max {
        let fi = i as f64;
        f.push(2.0 * d * d / om + d.powi(3) * (1.0 - d.powi(i as i32 - 2)) / (om * om) + fi * d.powi(i as i32 + 1) / om);
        g.push(d * d * (1.0 - d.powi(i as i32 - 1)) / om);
        // factor (beta_i / (r_i - r_{i+1}))^{1/beta_i} = ((2/delta)^i (8/r1))^{delta^i}
        fs += fi * d.powi(i as i32);
        gs += d.powi(i as i32);
        f_ladder.push(fs);
        g_ladder.push(gs);
    }
    Ok(MoserLadder { delta: d, radii, betas, f, g, f_ladder, g_ladder, f_inf: m.f_inf, g_inf: m.g_inf })
}

#[derive(Debug, Clone, Serialize)]
pub struct MoserCheck {
    /// `|u|_inf <= direct bound`.
    pub check: BoundCheck,
    /// `|u|_{2*}`.
    pub l_two_star: f64,
    pub r1: f64,
    pub direct_bound: f64,
    /// `C1 (1 + L^{C2}) L`; never below `direct_bound`.
    pub simplified_bound: f64,
    /// Sobolev constant used for the chain.
    pub s0: f64,
}

/// Checks the field's sup norm against the Moser estimate built from its `L^6` norm.
pub fn moser_bound<T: Real>(u: &Field<T>, params: &Params<T>, s0: T) -> Result<MoserCheck> {
    let l = lq_norm(u, lit(6.0))?;
    if l == T::zero() {
        return Err(Error::InvalidInput("moser bound of the zero field".into()));
    }
    if !(s0 > T::zero()) {
        return Err(Error::InvalidInput("Sobolev constant must be positive".into()));
    }
    let m = moser_constants(params.p, s0);
    let direct = to_f64(m.direct_bound(params.p, l));
    let simplified = to_f64(m.simplified_bound(l));
    let sup = to_f64(u.sup_norm());
    let check = BoundCheck::upper("moser_sup_bound", sup, direct, 1e-12 * direct)
        .with_detail(format!("|u|_6 = {:.6e}, S0 = {:.6}", to_f64(l), to_f64(s0)));
    Ok(MoserCheck {
        check,
        l_two_star: to_f64(l),
        r1: to_f64(r1(params.p, m.beta0, m.gamma, l)),
        direct_bound: direct,
        simplified_bound: simplified,
        s0: to_f64(s0),
    })
}
