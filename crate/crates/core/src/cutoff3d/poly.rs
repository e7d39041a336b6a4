//! Sparse trivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int};
use crate::Rational;

/// Exponents of `(x, y, z)`.
pub type Exp = [u32; 3];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly3 {
    terms: BTreeMap<Exp, Rational>,
}

impl Poly3 {
    pub fn zero() -> Self {
        Poly3::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly3::zero();
        p.add_term([0, 0, 0], c);
        p
    }

    pub fn one() -> Self {
        Poly3::constant(Rational::one())
    }

    /// The coordinate `x`, `y` or `z` for `i = 0, 1, 2`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        let mut p = Poly3::zero();
        p.add_term(e, Rational::one());
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exp) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Highest power of variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Exp, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Poly3) -> Poly3 {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly3) -> Poly3 {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, -c);
        }
        r
    }

    pub fn scale(&self, c: &Rational) -> Poly3 {
        if c.is_zero() {
            return Poly3::zero();
        }
        Poly3 { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn mul(&self, o: &Poly3) -> Poly3 {
        let mut r = Poly3::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Poly3 {
        let mut r = Poly3::one();
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// `q(v) = p(v[s[0]], v[s[1]], v[s[2]])`.
    pub fn permute(&self, s: [usize; 3]) -> Poly3 {
        let mut r = Poly3::zero();
        for (e, c) in &self.terms {
            let mut f = [0; 3];
            for i in 0..3 {
                f[s[i]] += e[i];
            }
            r.add_term(f, c.clone());
        }
        r
    }

    /// Replaces variable `i` by `q`, which must not involve it.
    pub fn substitute(&self, i: usize, q: &Poly3) -> Poly3 {
        debug_assert_eq!(q.degree_in(i), 0);
        let mut powers = vec![Poly3::one()];
        let mut r = Poly3::zero();
        for (e, c) in &self.terms {
            while powers.len() <= e[i] as usize {
                let next = powers.last().unwrap().mul(q);
                powers.push(next);
            }
            let mut rest = *e;
            rest[i] = 0;
            let mut mono = Poly3::zero();
            mono.add_term(rest, c.clone());
            r = r.add(&mono.mul(&powers[e[i] as usize]));
        }
        r
    }

    /// `int_lo^hi p dv_i` with `lo`, `hi` free of `v_i`; signed when `hi < lo`.
    pub fn integrate(&self, i: usize, lo: &Poly3, hi: &Poly3) -> Poly3 {
        let mut anti = Poly3::zero();
        for (e, c) in &self.terms {
            let mut f = *e;
            f[i] += 1;
            anti.add_term(f, c / int(f[i] as i64));
        }
        anti.substitute(i, hi).sub(&anti.substitute(i, lo))
    }

    pub fn eval(&self, v: &[Rational; 3]) -> Rational {
        let mut s = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..3 {
                for _ in 0..e[i] {
                    t *= &v[i];
                }
            }
            s += t;
        }
        s
    }

    pub fn eval_f64(&self, v: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c.to_f64().unwrap_or(f64::NAN) * v[0].powi(e[0] as i32) * v[1].powi(e[1] as i32) * v[2].powi(e[2] as i32)
            })
            .sum()
    }

    /// Value of a polynomial without variables.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&[0, 0, 0]).cloned(),
            _ => None,
        }
    }

    /// Parses text such as `-66+96x-147x^2+3xy^2z` or `1/2-3e/2`; the symbol
    /// `e` stands for the value `eps`.
    pub fn parse(text: &str, eps: &Rational) -> Result<Poly3> {
        let bad = |msg: &str| Error::InvalidInput(format!("polynomial {text:?}: {msg}"));
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(bad("empty"));
        }
        let mut pos = 0;
        let mut out = Poly3::zero();
        let number = |pos: &mut usize| -> Option<BigInt> {
            let start = *pos;
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            (start < *pos).then(|| chars[start..*pos].iter().collect::<String>().parse().unwrap())
        };
        while pos < chars.len() {
            let mut sign = Rational::one();
            if chars[pos] == '+' || chars[pos] == '-' {
                if chars[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            } else if pos > 0 {
                return Err(bad("expected sign between terms"));
            }
            let lead = number(&mut pos);
            let mut any = lead.is_some();
            let mut coeff = lead.map(Rational::from_integer).unwrap_or_else(Rational::one);
            let mut e = [0u32; 3];
            while pos < chars.len() && "xyze".contains(chars[pos]) {
                let v = chars[pos];
                pos += 1;
                let mut p = 1u32;
                if pos < chars.len() && chars[pos] == '^' {
                    pos += 1;
                    p = number(&mut pos).ok_or_else(|| bad("missing exponent"))?.to_u32().ok_or_else(|| bad("exponent"))?;
                }
                match v {
                    'x' => e[0] += p,
                    'y' => e[1] += p,
                    'z' => e[2] += p,
                    _ => coeff *= crate::rational::pow(eps, p),
                }
                any = true;
            }
            if pos < chars.len() && chars[pos] == '/' {
                pos += 1;
                let d = number(&mut pos).ok_or_else(|| bad("missing denominator"))?;
                if d.is_zero() {
                    return Err(bad("zero denominator"));
                }
                coeff /= Rational::from_integer(d);
            }
            if !any {
                return Err(bad("empty term"));
            }
            if pos < chars.len() && !matches!(chars[pos], '+' | '-') {
                return Err(bad(&format!("unexpected {:?}", chars[pos])));
            }
            out.add_term(e, sign * coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono: String = ["x", "y", "z"]
                .iter()
                .zip(e)
                .filter(|(_, &p)| p > 0)
                .map(|(v, &p)| if p == 1 { v.to_string() } else { format!("{v}^{p}") })
                .collect::<Vec<_>>()
                .join("*");
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rational(&a))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn parse_and_evaluate() {
        let e = ratio(1, 4);
        let p = Poly3::parse("-66+96x-147x^2+3xy^2z", &e).unwrap();
        let v = [int(2), int(3), int(5)];
        assert_eq!(p.eval(&v), int(-66 + 192 - 588 + 3 * 2 * 9 * 5));
        assert_eq!(Poly3::parse("1/2-3e/2", &e).unwrap(), Poly3::constant(ratio(1, 8)));
        assert_eq!(Poly3::parse("y+2e", &e).unwrap(), Poly3::var(1).add(&Poly3::constant(ratio(1, 2))));
        assert!(Poly3::parse("2x*y", &e).is_err());
        assert!(Poly3::parse("", &e).is_err());
    }

    #[test]
    fn integrate_with_affine_limits() {
        let e = Rational::zero();
        // int_0^{1-x} y dy = (1-x)^2/2
        let p = Poly3::var(1).integrate(1, &Poly3::zero(), &Poly3::parse("1-x", &e).unwrap());
        assert_eq!(p, Poly3::parse("1/2-x+x^2/2", &e).unwrap());
        let back = Poly3::var(0).integrate(0, &Poly3::one(), &Poly3::zero());
        assert_eq!(back, Poly3::constant(ratio(-1, 2)));
    }

    #[test]
    fn permute_moves_exponents() {
        let e = Rational::zero();
        let p = Poly3::parse("x^2y", &e).unwrap();
        // p(y, z, x) = y^2 z
        assert_eq!(p.permute([1, 2, 0]), Poly3::parse("y^2z", &e).unwrap());
    }
}
