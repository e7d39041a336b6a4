//! Exact symmetric polynomials in the monomial basis `P_alpha`, integration
//! over simplices and the operator `L`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{binomial, factorial};
use crate::Rational;

/// Non-increasing positive parts; the empty signature is the constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Signature(Vec<u32>);

impl Signature {
    /// Sorts the parts and drops zeros.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Signature(parts)
    }

    pub fn empty() -> Self {
        Signature(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Removes one copy of `m`; `m = 0` returns the signature unchanged.
    pub fn remove_part(&self, m: u32) -> Option<Signature> {
        if m == 0 {
            return Some(self.clone());
        }
        let i = self.0.iter().position(|&p| p == m)?;
        let mut v = self.0.clone();
        v.remove(i);
        Some(Signature(v))
    }

    fn distinct_parts(&self) -> Vec<u32> {
        let mut v = self.0.clone();
        v.dedup();
        v
    }

    fn multiplicities(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let j = self.0[i..].iter().take_while(|&&p| p == self.0[i]).count();
            out.push(j as u64);
            i += j;
        }
        out
    }

    /// Number of distinct monomials of this shape in `k` variables.
    pub fn monomial_count(&self, k: usize) -> BigInt {
        let l = self.len();
        if l > k {
            return BigInt::zero();
        }
        let mut den = factorial((k - l) as u64);
        for m in self.multiplicities() {
            den *= factorial(m);
        }
        factorial(k as u64) / den
    }

    /// `prod alpha_i!`
    pub fn part_factorials(&self) -> BigInt {
        self.0.iter().map(|&p| factorial(p as u64)).product()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `int_{R_k} (1 - t_1 - ... - t_k)^a t_1^{a_1} ... t_k^{a_k} dt`.
pub fn beta_integral(a: u32, exponents: &[u32]) -> Rational {
    let k = exponents.len() as u64;
    let mut num = factorial(a as u64);
    let mut total = a as u64 + k;
    for &e in exponents {
        num *= factorial(e as u64);
        total += e as u64;
    }
    Rational::new(num, factorial(total))
}

/// `int_{R_n} (1 - P_(1))^a P_gamma dt`, by the Beta identity on each monomial.
pub fn simplex_moment(n: usize, a: u32, gamma: &Signature) -> Rational {
    let count = gamma.monomial_count(n);
    if count.is_zero() {
        return Rational::zero();
    }
    let num = count * factorial(a as u64) * gamma.part_factorials();
    Rational::new(num, factorial(a as u64 + gamma.degree() as u64 + n as u64))
}

/// Sum of `coeff * P_alpha` in `k` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPoly {
    k: usize,
    terms: BTreeMap<Signature, Rational>,
}

impl SymPoly {
    pub fn zero(k: usize) -> Self {
        SymPoly { k, terms: BTreeMap::new() }
    }

    pub fn constant(k: usize, c: Rational) -> Self {
        let mut p = SymPoly::zero(k);
        p.add_term(Signature::empty(), c);
        p
    }

    pub fn one(k: usize) -> Self {
        SymPoly::constant(k, Rational::one())
    }

    /// `P_alpha`; errors when `alpha` has more than `k` parts.
    pub fn monomial(k: usize, alpha: Signature) -> Result<Self> {
        if alpha.len() > k {
            return Err(Error::InvalidInput(format!("signature {alpha} has more than {k} parts")));
        }
        let mut p = SymPoly::zero(k);
        p.add_term(alpha, Rational::one());
        Ok(p)
    }

    /// `P_(1) = t_1 + ... + t_k`.
    pub fn p1(k: usize) -> Self {
        let mut p = SymPoly::zero(k);
        if k > 0 {
            p.add_term(Signature(vec![1]), Rational::one());
        }
        p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Signature, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &Signature) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Signature::degree).max().unwrap_or(0)
    }

    /// Adds `c * P_alpha`; terms with more than `k` parts vanish identically.
    pub fn add_term(&mut self, alpha: Signature, c: Rational) {
        if c.is_zero() || alpha.len() > self.k {
            return;
        }
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.k, other.k, "ambient dimension mismatch");
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> SymPoly {
        let mut out = SymPoly::zero(self.k);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(s, v)| (s.clone(), v * c)).collect();
        out
    }

    pub fn sub(&self, other: &SymPoly) -> SymPoly {
        self.add(&other.scale(&-Rational::one()))
    }
}

impl fmt::Display for SymPoly {
    /// Debug dump `c * P[alpha] + ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let items: Vec<String> = self.terms.iter().map(|(s, c)| format!("{c} * P{s}")).collect();
        write!(f, "{}", items.join(" + "))
    }
}

type Table = HashMap<(Signature, Signature), Arc<Vec<(Signature, BigInt)>>>;

/// Symmetric polynomials in `k` variables with a degree cap; structure
/// constants are memoized and shared with derived rings.
#[derive(Clone, Debug)]
pub struct SymRing {
    k: usize,
    cap: u32,
    table: Arc<Mutex<Table>>,
}

impl SymRing {
    pub fn new(k: usize, cap: u32) -> Self {
        SymRing { k, cap, table: Arc::new(Mutex::new(HashMap::new())) }
    }

    /// Ring in `k` variables sharing this ring's table.
    pub fn with_dim(&self, k: usize) -> SymRing {
        SymRing { k, cap: self.cap, table: Arc::clone(&self.table) }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn check(&self, f: &SymPoly) -> Result<()> {
        if f.k != self.k {
            return Err(Error::SizeMismatch { expected: self.k, found: f.k });
        }
        let d = f.degree();
        if d > self.cap {
            return Err(Error::DegreeOverflow { degree: d, cap: self.cap });
        }
        Ok(())
    }

    /// `P_alpha P_beta = sum_gamma c_gamma P_gamma` over all `gamma` (any length).
    pub fn structure_constants(&self, alpha: &Signature, beta: &Signature) -> Arc<Vec<(Signature, BigInt)>> {
        let key = if alpha <= beta { (alpha.clone(), beta.clone()) } else { (beta.clone(), alpha.clone()) };
        if let Some(v) = self.table.lock().unwrap().get(&key) {
            return Arc::clone(v);
        }
        let v = Arc::new(compute_structure_constants(&key.0, &key.1));
        self.table.lock().unwrap().insert(key, Arc::clone(&v));
        v
    }

    pub fn multiply(&self, f: &SymPoly, g: &SymPoly) -> Result<SymPoly> {
        self.check(f)?;
        self.check(g)?;
        let deg = f.degree() + g.degree();
        if !f.is_zero() && !g.is_zero() && deg > self.cap {
            return Err(Error::DegreeOverflow { degree: deg, cap: self.cap });
        }
        Ok(self.multiply_unchecked(f, g))
    }

    fn multiply_unchecked(&self, f: &SymPoly, g: &SymPoly) -> SymPoly {
        let mut acc: BTreeMap<Signature, Rational> = BTreeMap::new();
        for (a, ca) in &f.terms {
            for (b, cb) in &g.terms {
                let prod = ca * cb;
                for (gamma, c) in self.structure_constants(a, b).iter() {
                    if gamma.len() <= self.k {
                        *acc.entry(gamma.clone()).or_insert_with(Rational::zero) += &prod * Rational::from(c.clone());
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        SymPoly { k: self.k, terms: acc }
    }

    /// `int_{scale R_k} f dt`.
    pub fn integrate_simplex(&self, f: &SymPoly, scale: &Rational) -> Result<Rational> {
        if !scale.is_positive() {
            return Err(Error::InvalidInput("scale must be positive".into()));
        }
        self.check(f)?;
        let mut total = Rational::zero();
        for (alpha, c) in &f.terms {
            let e = alpha.degree() + self.k as u32;
            total += c * simplex_moment(self.k, 0, alpha) * pow(scale, e);
        }
        Ok(total)
    }

    pub fn inner_product(&self, f: &SymPoly, g: &SymPoly) -> Result<Rational> {
        let fg = self.multiply(f, g)?;
        self.integrate_simplex(&fg, &Rational::one())
    }

    /// `(1 - P_(1))^n`.
    pub fn one_minus_p1_pow(&self, n: u32) -> SymPoly {
        let mut out = SymPoly::zero(self.k);
        for r in 0..=n {
            let c = Rational::from(binomial(n as u64, r as u64));
            let c = if r % 2 == 1 { -c } else { c };
            for (beta, m) in p1_power(r) {
                out.add_term(beta, &c * Rational::from(m));
            }
        }
        out
    }

    /// `L f = sum_i int_0^{1 - sum_{j != i} t_j} f(..., t_i', ...) dt_i'`.
    pub fn apply_l(&self, f: &SymPoly) -> Result<SymPoly> {
        self.check(f)?;
        let d = f.degree() + 1;
        if !f.is_zero() && d > self.cap {
            return Err(Error::DegreeOverflow { degree: d, cap: self.cap });
        }
        let k = self.k;
        if k == 0 {
            return Err(Error::InvalidInput("L needs at least one variable".into()));
        }
        let sub = self.with_dim(k - 1);
        let mut out = SymPoly::zero(k);
        for (alpha, c) in &f.terms {
            let mut slots = alpha.distinct_parts();
            if alpha.len() < k {
                slots.push(0);
            }
            for m in slots {
                let rest = alpha.remove_part(m).expect("m is a part of alpha or zero");
                if rest.len() > k - 1 {
                    continue;
                }
                let base = SymPoly::monomial(k - 1, rest)?;
                let prod = sub.multiply_unchecked(&base, &sub.one_minus_p1_pow(m + 1));
                let w = c / Rational::from_integer(BigInt::from(m + 1));
                for (beta, cb) in prod.terms {
                    let lift = Rational::from_integer(BigInt::from((k - beta.len()) as u64));
                    out.add_term(beta, &w * cb * lift);
                }
            }
        }
        Ok(out)
    }
}

fn pow(q: &Rational, e: u32) -> Rational {
    if q.is_one() {
        return Rational::one();
    }
    num_traits::pow(q.clone(), e as usize)
}

/// `P_(1)^r = sum_beta r!/prod(beta_i!) P_beta` over partitions `beta` of `r`.
pub fn p1_power(r: u32) -> Vec<(Signature, BigInt)> {
    let rf = factorial(r as u64);
    partitions(r)
        .into_iter()
        .map(|b| {
            let c = &rf / b.part_factorials();
            (b, c)
        })
        .collect()
}

/// All partitions of `n` as signatures.
pub fn partitions(n: u32) -> Vec<Signature> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Signature>) {
        if n == 0 {
            out.push(Signature(cur.clone()));
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Candidate shapes: each part of `beta` lands on a distinct part of `alpha`
/// or on a fresh variable.
fn candidate_shapes(alpha: &Signature, beta: &Signature) -> BTreeSet<Signature> {
    fn rec(b: &[u32], slots: &mut Vec<u32>, used: &mut Vec<bool>, base: usize, out: &mut BTreeSet<Signature>) {
        let Some((&first, rest)) = b.split_first() else {
            out.insert(Signature::new(slots.clone()));
            return;
        };
        for i in 0..base {
            if !used[i] {
                used[i] = true;
                slots[i] += first;
                rec(rest, slots, used, base, out);
                slots[i] -= first;
                used[i] = false;
            }
        }
        slots.push(first);
        used.push(true);
        rec(rest, slots, used, base, out);
        slots.pop();
        used.pop();
    }
    let mut out = BTreeSet::new();
    let mut slots = alpha.0.clone();
    let mut used = vec![false; slots.len()];
    rec(&beta.0, &mut slots, &mut used, alpha.len(), &mut out);
    out
}

/// Number of splittings `gamma = a + b` of a fixed exponent vector with
/// `shape(a) = alpha`, `shape(b) = beta`.
fn count_splittings(gamma: &[u32], alpha: &mut BTreeMap<u32, u32>, beta: &mut BTreeMap<u32, u32>) -> u64 {
    let Some((&g, rest)) = gamma.split_first() else {
        return u64::from(alpha.is_empty() && beta.is_empty());
    };
    let mut total = 0;
    let choices: Vec<u32> = std::iter::once(0).chain(alpha.keys().copied().filter(|&v| v <= g)).collect();
    for a in choices {
        let b = g - a;
        if b > 0 && !beta.contains_key(&b) {
            continue;
        }
        take(alpha, a);
        take(beta, b);
        total += count_splittings(rest, alpha, beta);
        give(alpha, a);
        give(beta, b);
    }
    total
}

fn take(m: &mut BTreeMap<u32, u32>, v: u32) {
    if v == 0 {
        return;
    }
    let c = m.get_mut(&v).expect("value present");
    *c -= 1;
    if *c == 0 {
        m.remove(&v);
    }
}

fn give(m: &mut BTreeMap<u32, u32>, v: u32) {
    if v > 0 {
        *m.entry(v).or_insert(0) += 1;
    }
}

fn multiset(s: &Signature) -> BTreeMap<u32, u32> {
    let mut m = BTreeMap::new();
    for &p in s.parts() {
        *m.entry(p).or_insert(0) += 1;
    }
    m
}

fn compute_structure_constants(alpha: &Signature, beta: &Signature) -> Vec<(Signature, BigInt)> {
    let mut a = multiset(alpha);
    let mut b = multiset(beta);
    candidate_shapes(alpha, beta)
        .into_iter()
        .map(|gamma| {
            let c = count_splittings(gamma.parts(), &mut a, &mut b);
            (gamma, BigInt::from(c))
        })
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn sig(v: &[u32]) -> Signature {
        Signature::new(v.to_vec())
    }

    #[test]
    fn products() {
        let r = SymRing::new(3, 10);
        let p1 = SymPoly::p1(3);
        let sq = r.multiply(&p1, &p1).unwrap();
        assert_eq!(sq.coeff(&sig(&[2])), ratio(1, 1));
        assert_eq!(sq.coeff(&sig(&[1, 1])), ratio(2, 1));
        let p2 = SymPoly::monomial(3, sig(&[2])).unwrap();
        let x = r.multiply(&p1, &p2).unwrap();
        assert_eq!(x.to_string(), "1 * P[2,1] + 1 * P[3]");
        let r2 = SymRing::new(2, 10);
        let p11 = SymPoly::monomial(2, sig(&[1, 1])).unwrap();
        let y = r2.multiply(&SymPoly::p1(2), &p11).unwrap();
        assert_eq!(y.to_string(), "1 * P[2,1]");
    }

    #[test]
    fn l_of_one_and_p1() {
        for k in 1..6usize {
            let r = SymRing::new(k, 10);
            let kk = k as i64;
            let l1 = r.apply_l(&SymPoly::one(k)).unwrap();
            let mut want = SymPoly::constant(k, ratio(kk, 1));
            want.add_term(sig(&[1]), ratio(-(kk - 1), 1));
            assert_eq!(l1, want);
            let lp = r.apply_l(&SymPoly::p1(k)).unwrap();
            let mut want = SymPoly::constant(k, ratio(kk, 2));
            want.add_term(sig(&[2]), ratio(-(kk - 1), 2));
            want.add_term(sig(&[1, 1]), ratio(-(kk - 2), 1));
            assert_eq!(lp, want, "k = {k}");
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let r = SymRing::new(2, 2);
        let p2 = SymPoly::monomial(2, sig(&[2])).unwrap();
        assert!(matches!(r.multiply(&p2, &p2), Err(Error::DegreeOverflow { degree: 4, cap: 2 })));
        assert!(r.apply_l(&p2).is_err());
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(sig(&[2, 1]).monomial_count(3), BigInt::from(6));
        assert_eq!(sig(&[1, 1]).monomial_count(3), BigInt::from(3));
        assert_eq!(sig(&[1, 1, 1, 1]).monomial_count(3), BigInt::zero());
    }
}
