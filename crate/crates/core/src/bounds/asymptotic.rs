//! Explicit lower bound for the truncated quantity `M_k^{[T]}` built from the
//! trial function `g(t) = 1/(c + (k-1)t)` on `[0, T]`.

use crate::error::{Error, Result};
use crate::quad::{Estimate, Integrator};
use crate::real::Real;

#[derive(Clone, Copy, Debug)]
pub enum Tau<T> {
    /// `tau = 1 - k mu`.
    Derived,
    Explicit(T),
}

#[derive(Clone, Copy, Debug)]
pub struct AsymptoticParams<T> {
    pub k: u64,
    pub c: T,
    pub t: T,
    pub tau: Tau<T>,
}

impl<T: Real> AsymptoticParams<T> {
    /// Parameters in the `c = theta/ln k`, `T = beta/ln k` form.
    pub fn from_theta_beta(k: u64, theta: T, beta: T, tau: Tau<T>) -> Self {
        let lk = T::from_int(k as i64).ln();
        AsymptoticParams { k, c: theta / lk, t: beta / lk, tau }
    }
}

#[derive(Clone, Debug)]
pub struct AsymptoticReport<T> {
    pub k: u64,
    pub c: T,
    pub t: T,
    pub tau: T,
    pub m2: T,
    pub mu: T,
    pub sigma2: T,
    pub z: Estimate<T>,
    pub z3: Estimate<T>,
    pub w: Estimate<T>,
    pub x: T,
    pub v: Estimate<T>,
    pub u: T,
    /// Central value of the bound before the error budget is removed.
    pub central: T,
    /// Total error budget removed from `central`.
    pub budget: T,
    /// `central - budget`; a lower bound for `M_k^{[T]}` and hence for `M_k`.
    pub lower_bound: T,
}

/// Closed forms of `int_0^T t^j g(t)^2 dt` for `j = 0, 1, 2`.
pub fn g_moments<T: Real>(k: u64, c: T, t: T) -> [T; 3] {
    let one = T::one();
    let km1 = T::from_int(k as i64 - 1);
    let end = c + km1 * t;
    let l = (end / c).ln();
    let m0 = (one / c - one / end) / km1;
    let m1 = (l + c / end - one) / (km1 * km1);
    let m2 = (km1 * t - T::lit(2.0) * c * l - c * c / end + c) / (km1 * km1 * km1);
    [m0, m1, m2]
}

pub fn asymptotic_lower<T: Real>(p: &AsymptoticParams<T>, tol: T) -> Result<AsymptoticReport<T>> {
    let k = p.k;
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let (c, tt) = (p.c, p.t);
    if !(c > T::zero() && tt > T::zero()) {
        return Err(Error::InvalidInput("c and T must be positive".into()));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let kf = T::from_int(k as i64);
    let km1 = kf - one;
    let lk = kf.ln();
    let g = move |t: T| one / (c + km1 * t);

    let [i0, i1, i2] = g_moments(k, c, tt);
    let m2 = i0;
    let mu = i1 / m2;
    let sigma2 = i2 / m2 - mu * mu;
    let tau = match p.tau {
        Tau::Derived => one - kf * mu,
        Tau::Explicit(v) => v,
    };
    if !(tau > T::zero()) {
        return Err(Error::InvalidInput("tau must be positive".into()));
    }
    if kf * mu > one - tau {
        return Err(Error::ConditionViolated("k mu <= 1 - tau"));
    }
    if !(kf * mu < one - tt) {
        return Err(Error::ConditionViolated("k mu < 1 - T"));
    }
    let gap = one + tau - kf * mu;
    if !(kf * sigma2 < gap * gap) {
        return Err(Error::ConditionViolated("k sigma^2 < (1 + tau - k mu)^2"));
    }

    let quad = Integrator::<T>::new(12);
    let scale = |e: Estimate<T>, s: T| Estimate { value: e.value * s, error: e.error * s.abs() };

    let kmu = kf * mu;
    let z_raw = quad.integrate(
        |r: T| {
            let d = r - kmu;
            let l = (d / tt).ln();
            r * (l + kf * sigma2 / (T::lit(4.0) * d * d * l)) + r * r / (T::lit(4.0) * kf * tt)
        },
        one,
        one + tau,
        tol,
    );
    let z = scale(z_raw, one / tau);

    let z3_raw = quad.integrate(|t: T| kf * t * (one + t / tt).ln() * g(t) * g(t), T::zero(), tt, tol);
    let z3 = scale(z3_raw, one / m2);

    // log singularity at t = 0: geometric panels plus an explicit tail bound
    let levels = 90;
    let breaks: Vec<T> = (0..=levels).rev().map(|j| tt * T::lit(0.5).powi(j)).collect();
    let a = breaks[0];
    let mut w_int = quad.integrate_breaks(
        &mut |t: T| (one + tau / (kf * t)).ln() * g(t) * g(t),
        &breaks,
        tol,
    );
    // int_0^a log(1 + b/t) dt <= a log(1 + b/a) + a, with g <= 1/c
    let b = tau / kf;
    let tail = (a * (one + b / a).ln() + a) / (c * c);
    w_int.value += tail;
    w_int.error += tail;
    let w = scale(w_int, one / m2);

    let x = lk / tau * c * c;

    let v_raw = quad.integrate(|t: T| g(t) * g(t) / (two * c + km1 * t), T::zero(), tt, tol);
    let v = scale(v_raw, c / m2);

    // int_0^1 (A + u tau)^2 du = A^2 + A tau + tau^2/3
    let aa = one - km1 * mu - c;
    let u = lk / c * (aa * aa + aa * tau + tau * tau / T::lit(3.0) + km1 * sigma2);

    let denom = (one + tau / two) * (one - kf * sigma2 / (gap * gap));
    let pref = kf / km1;
    let numer = z.value + z3.value + w.value * x + v.value * u;
    let central = pref * lk - pref * numer / denom;
    let numer_err = z.error + z3.error + w.error * x + v.error * u;
    let rounding = T::lit(1e3) * T::epsilon() * (pref * lk).abs().max(one);
    let budget = T::lit(2.0) * pref * numer_err / denom + rounding;
    let lower_bound = central - budget;
    Ok(AsymptoticReport {
        k,
        c,
        t: tt,
        tau,
        m2,
        mu,
        sigma2,
        z,
        z3,
        w,
        x,
        v,
        u,
        central,
        budget,
        lower_bound,
    })
}
