//! Closed-form and special-function bounds on M_k and its variants.

mod asymptotic;

pub use asymptotic::{asymptotic_lower, AsymptoticParams, AsymptoticReport, Tau};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, pow};
use crate::real::Real;

/// Universal upper bound `k/(k-1) ln k`.
pub fn mk_upper<T: Real>(k: u64) -> T {
    assert!(k >= 2, "k must be at least 2");
    let kf = T::from_int(k as i64);
    kf / (kf - T::one()) * kf.ln()
}

/// Principal branch of Lambert W for `x >= -1/e`, by Newton's method.
pub fn lambert_w<T: Real>(x: T) -> T {
    let xf = x.approx();
    let mut w = T::lit(if xf < 1.0 { (1.0 + xf).ln().max(-0.9) } else { xf.ln() - xf.ln().max(1.0).ln() * 0.5 });
    for _ in 0..200 {
        let ew = w.exp();
        let f = w * ew - x;
        let step = f / (ew * (w + T::one()));
        w -= step;
        if step.abs() <= T::epsilon() * T::lit(8.0) * w.abs().max(T::one()) {
            break;
        }
    }
    w
}

/// The exact value `M_2 = 1/(1 - W(1/e))`.
pub fn m2_exact<T: Real>() -> T {
    let e = T::one().exp();
    T::one() / (T::one() - lambert_w(T::one() / e))
}

/// `M_{2,eps}` for `0 < eps < 1`.
///
/// For `eps >= 1/3` this is `(e(1+eps) - 2 eps)/(e - 1)`. Below 1/3 it is the
/// largest root of
///
/// `1 = C(log(l-1+eps) - log(l-1-eps)) - log(l-1+eps) + ((l-1+eps)log(l-1+eps) + (l-2eps)log(l-2eps))/(2l-1-eps)`
///
/// with `C = (log(l-2eps) - log(l-1+eps))/(1 - log(l-1+eps) + log(l-1-eps))`.
/// The equation is multiplied through by the denominator of `C`, which
/// removes its pole at `l = 1 + eps(e+1)/(e-1)`; the root lies above that pole.
pub fn m2_eps<T: Real>(eps: T) -> Result<T> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::InvalidInput("eps must lie in (0, 1)".into()));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let e = one.exp();
    if eps * T::lit(3.0) >= one {
        return Ok((e * (one + eps) - two * eps) / (e - one));
    }
    let g = |l: T| -> T {
        let a = l - one + eps;
        let b = l - one - eps;
        let c = l - two * eps;
        let (la, lb, lc) = (a.ln(), b.ln(), c.ln());
        let s = lc - la;
        let den = one - la + lb;
        s * (la - lb) + den * (-la + (a * la + c * lc) / (two * l - one - eps) - one)
    };
    let pole = one + eps * (e + one) / (e - one);
    let mut lo = pole.max(m2_exact::<T>());
    let mut hi = two;
    let glo = g(lo);
    let ghi = g(hi);
    if glo.is_zero() {
        return Ok(lo);
    }
    if !(glo > T::zero() && ghi < T::zero()) {
        return Err(Error::NoConvergence("no sign change in the M_{2,eps} bracket".into()));
    }
    for _ in 0..400 {
        let mid = (lo + hi) / two;
        if g(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * T::lit(16.0) {
            break;
        }
    }
    Ok((lo + hi) / two)
}

/// Parametrised upper bound on `M_{k,eps}`; `a = 1` gives `k/(k-1) ln(2k-1)`.
pub fn mkeps_upper<T: Real>(k: u64, eps: T, a: T) -> Result<T> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let one = T::one();
    if !(a > one / (one + eps) && a < one / (one - eps)) {
        return Err(Error::InvalidInput("a must lie in (1/(1+eps), 1/(1-eps))".into()));
    }
    let kf = T::from_int(k as i64);
    let inner = kf + (a * (one + eps) - one) * (kf - one) / (one - a * (one - eps));
    Ok(kf / (a * (kf - one)) * inner.ln())
}

/// Bessel function `J_n(x)` for integer order, by Miller's backward recurrence.
pub fn bessel_j<T: Real>(n: u32, x: T) -> T {
    if x.is_zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    let xf = x.approx().abs();
    let start = n.max(xf.ceil() as u32) as f64;
    let mut m = (start + 30.0 + (40.0 * start.max(1.0)).sqrt()) as u32;
    m += m % 2;
    let two_over_x = T::lit(2.0) / x;
    let mut next = T::zero();
    let mut cur = T::lit(1e-30);
    let mut norm = T::zero();
    let mut jn = T::zero();
    let big = T::lit(1e100);
    for i in (1..=m).rev() {
        let prev = T::from_int(i as i64) * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds j_{i-1}
        if i - 1 == n {
            jn = cur;
        }
        if (i - 1) % 2 == 0 && i - 1 > 0 {
            norm += T::lit(2.0) * cur;
        }
        if cur.abs() > big {
            let s = T::lit(1e-100);
            cur *= s;
            next *= s;
            norm *= s;
            jn *= s;
        }
    }
    norm += cur;
    jn / norm
}

/// First positive zero of `J_nu`.
pub fn bessel_first_zero<T: Real>(nu: u32) -> T {
    let f = |x: T| bessel_j::<T>(nu, x);
    let step = T::lit(0.25);
    let mut a = T::lit((nu as f64).max(0.5));
    let mut fa = f(a);
    let mut b = a + step;
    let mut fb = f(b);
    while (fa > T::zero()) == (fb > T::zero()) {
        a = b;
        fa = fb;
        b = b + step;
        fb = f(b);
    }
    for _ in 0..200 {
        let m = (a + b) / T::lit(2.0);
        let fm = f(m);
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if b - a <= T::lit(1e-6) {
            break;
        }
    }
    let mut x = (a + b) / T::lit(2.0);
    for _ in 0..50 {
        let j = f(x);
        let dj = if nu == 0 {
            -bessel_j::<T>(1, x)
        } else {
            bessel_j::<T>(nu - 1, x) - T::from_int(nu as i64) / x * j
        };
        let dx = j / dj;
        x -= dx;
        if dx.abs() <= T::epsilon() * T::lit(16.0) * x {
            break;
        }
    }
    x
}

/// Lower bound `4k(k-1)/j_{k-2}^2` on `M_k`.
pub fn bessel_lower<T: Real>(k: u64) -> T {
    assert!(k >= 2, "k must be at least 2");
    let j = bessel_first_zero::<T>((k - 2) as u32);
    let kf = T::from_int(k as i64);
    T::lit(4.0) * kf * (kf - T::one()) / (j * j)
}

/// Exact check of the four-dimensional linear cutoff
/// `F = (1 - alpha(t1+t2+t3+t4)) 1_{t1+..+t4 <= 1+eps}`.
#[derive(Clone, Debug)]
pub struct M4EpsCheck {
    pub i: BigRational,
    pub j: BigRational,
    pub ratio_ok: bool,
}

pub fn m4eps_check(eps: &BigRational, alpha: &BigRational) -> Result<M4EpsCheck> {
    if !(eps > &BigRational::zero() && eps < &crate::rational::ratio(1, 2)) {
        return Err(Error::InvalidInput("eps must lie in (0, 1/2)".into()));
    }
    let one = BigRational::one();
    let s = &one + eps;
    let i = alpha * alpha * pow(&s, 6) / int(36) - alpha * pow(&s, 5) / int(15) + pow(&s, 4) / int(24);
    // (1+eps-u)^2 (1 - alpha(1+eps+u)/2)^2 u^2/2 as a polynomial in u
    let half = crate::rational::ratio(1, 2);
    let p1 = vec![s.clone(), -one.clone()];
    let p2 = vec![&one - alpha * &s * &half, -(alpha * &half)];
    let p1sq = poly_mul(&p1, &p1);
    let p2sq = poly_mul(&p2, &p2);
    let mut integrand = poly_mul(&p1sq, &p2sq);
    integrand = poly_mul(&integrand, &[BigRational::zero(), BigRational::zero(), half]);
    let upper = &one - eps;
    let j = poly_integral(&integrand, &upper);
    let ratio_ok = int(4) * &j > crate::rational::ratio(200558, 100000) * &i;
    Ok(M4EpsCheck { i, j, ratio_ok })
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `int_0^upper p(u) du`.
fn poly_integral(p: &[BigRational], upper: &BigRational) -> BigRational {
    p.iter()
        .enumerate()
        .map(|(i, c)| c * pow(upper, i as u32 + 1) / int(i as i64 + 1))
        .fold(BigRational::zero(), |a, b| a + b)
}
