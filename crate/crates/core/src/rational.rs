//! Helpers around `BigRational`: parsing, decimal output, rounding and
//! continued fractions.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p/q`, an integer, or a plain decimal such as `-1.25e-3`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{ip}{fp}").parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let mut q = BigRational::from_integer(digits);
    let ten = BigInt::from(10);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

/// Canonical `p/q` text (`p` alone for integers).
pub fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Decimal expansion truncated toward zero after `frac` digits.
pub fn to_decimal(q: &BigRational, frac: usize) -> String {
    let neg = q.is_negative();
    let a = q.abs();
    let scale = num_traits::pow(BigInt::from(10), frac);
    let scaled = (a.numer() * &scale) / a.denom();
    let (ip, fp) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&ip.to_string());
    if frac > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", fp.to_string(), width = frac));
    }
    s
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact value of a finite float.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("non-finite float {x}")))
}

/// Largest multiple of `1/denom` that is strictly below `q`.
pub fn floor_below(q: &BigRational, denom: &BigInt) -> BigRational {
    let scaled = q * BigRational::from_integer(denom.clone());
    let mut f = scaled.floor();
    if f == scaled {
        f -= BigRational::one();
    }
    f / BigRational::from_integer(denom.clone())
}

/// Smallest multiple of `1/denom` that is strictly above `q`.
pub fn ceil_above(q: &BigRational, denom: &BigInt) -> BigRational {
    -floor_below(&-q, denom)
}

/// Last continued-fraction convergent of `x` whose denominator is at most `bound`.
pub fn best_convergent(x: f64, bound: u64) -> BigRational {
    if !x.is_finite() || x == 0.0 {
        return BigRational::zero();
    }
    let exact = match BigRational::from_float(x) {
        Some(v) => v,
        None => return BigRational::zero(),
    };
    let bound = BigInt::from(bound.max(1));
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rem = exact;
    loop {
        let a = rem.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > bound {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = &rem - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rem = frac.recip();
    }
    BigRational::new(h1, k1)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn pow(q: &BigRational, e: u32) -> BigRational {
    num_traits::pow(q.clone(), e as usize)
}

pub fn sign(q: &BigRational) -> Sign {
    q.numer().sign()
}
