//! Real scalars for the quadrature-based evaluators: `f64` and a
//! double-double type carrying about 31 significant digits.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

/// Minimal real-field interface used by the special functions and quadrature.
pub trait Real:
    Copy
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + FromPrimitive
    + ToPrimitive
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    /// Unit roundoff of the representation.
    fn epsilon() -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    /// Exact rational value (every finite value is a dyadic rational).
    fn to_rational(self) -> BigRational;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer literal")
    }
    fn approx(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn to_rational(self) -> BigRational {
        BigRational::from_float(self).expect("finite value")
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const LN2: DoubleDouble = DoubleDouble { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };
    pub const E: DoubleDouble = DoubleDouble { hi: std::f64::consts::E, lo: 1.4456468917292502e-16 };

    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn from_parts(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        DoubleDouble { hi, lo }
    }

    fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        DoubleDouble { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// `exp(x) - 1` for `|x|` below about `1e-3`, by Taylor series.
    fn expm1_small(x: Self) -> Self {
        let mut term = x;
        let mut sum = x;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = term * x / DoubleDouble::from(n);
            sum += term;
            if term.hi == 0.0 || term.hi.abs() < 1e-36 * sum.hi.abs() {
                break;
            }
        }
        sum
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * DoubleDouble::from(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * DoubleDouble::from(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from(q3)
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            fn $m(&mut self, b: Self) {
                *self = *self $op b;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(DoubleDouble::zero(), |a, b| a + b)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble { hi: 0.0, lo: 0.0 }
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble { hi: 1.0, lo: 0.0 }
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        Some(DoubleDouble::from_parts(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = n.wrapping_sub(hi as u64) as i64 as f64;
        Some(DoubleDouble::from_parts(hi, lo))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(DoubleDouble::from(x))
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let h = self.hi.trunc();
        Some(h as i64 + (self.hi - h + self.lo).trunc() as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|v| u64::try_from(v).ok())
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl Real for DoubleDouble {
    fn epsilon() -> Self {
        DoubleDouble::from(4.93038065763132e-32)
    }

    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::from(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DoubleDouble::zero();
        }
        let k = (self.hi / Self::LN2.hi).round();
        let r = (self - Self::LN2 * DoubleDouble::from(k)).ldexp(-10);
        let mut p = Self::expm1_small(r);
        for _ in 0..10 {
            // (1+p)^2 - 1 = p(2+p)
            p = p * (p + DoubleDouble::from(2.0));
        }
        (p + DoubleDouble::one()).ldexp(k as i32)
    }

    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from(f64::NAN);
        }
        let mut x = DoubleDouble::from(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - DoubleDouble::one();
        }
        x
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { DoubleDouble::zero() } else { DoubleDouble::from(f64::NAN) };
        }
        let r = DoubleDouble::from(self.hi.sqrt());
        r + (self - r * r) / (r * DoubleDouble::from(2.0))
    }

    fn from_rational(q: &BigRational) -> Self {
        let hi = q.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return DoubleDouble::from(hi);
        }
        let rest = q - BigRational::from_float(hi).expect("finite");
        let lo = rest.to_f64().unwrap_or(0.0);
        DoubleDouble::from_parts(hi, lo)
    }

    fn to_rational(self) -> BigRational {
        BigRational::from_float(self.hi).expect("finite value")
            + BigRational::from_float(self.lo).expect("finite value")
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_finite() {
            return write!(f, "{}", self.hi);
        }
        let digits = f.precision().unwrap_or(30);
        write!(f, "{}", crate::rational::to_decimal(&self.to_rational(), digits))
    }
}

/// Alias used by the high-precision evaluators.
pub type DD = DoubleDouble;

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn close(a: DD, b: DD, tol: f64) -> bool {
        (a - b).abs().hi <= tol * b.abs().hi.max(1e-300)
    }

    #[test]
    fn constants_match_their_defining_functions() {
        assert!(close(DD::one().exp(), DD::E, 1e-31));
        assert!(close(DD::from(2.0).ln(), DD::LN2, 1e-31));
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[1e-20, 0.3, 1.0, 7.25, 123.456, 1e6] {
            let x = DD::from(x);
            assert!(close(x.ln().exp(), x, 1e-30), "{x}");
        }
        for &x in &[-30.0, -1.0, 0.001, 2.5, 40.0] {
            let x = DD::from(x);
            assert!((x.exp().ln() - x).abs().hi < 1e-30 * x.hi.abs().max(1.0), "{x}");
        }
    }

    #[test]
    fn division_and_sqrt() {
        let third = DD::one() / DD::from(3.0);
        assert!(close(third * DD::from(3.0), DD::one(), 1e-31));
        let r2 = DD::from(2.0).sqrt();
        assert!(close(r2 * r2, DD::from(2.0), 1e-31));
        // digits of sqrt(2)
        assert!(format!("{r2:.30}").starts_with("1.414213562373095048801688724209"));
    }

    #[test]
    fn rational_conversion_keeps_both_words() {
        let q = crate::rational::ratio(1, 3);
        let x = DD::from_rational(&q);
        let back = x.to_rational();
        let err = (back - q).abs();
        assert!(err < crate::rational::ratio(1, 1_000_000_000_000_000_000) * crate::rational::ratio(1, 1_000_000_000_000));
    }
}
