//! Moments `<L^i 1, 1>` and the Hankel form of the Krylov-subspace bound.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{lower_bound, BoundCertificate, Construction, GramPair, Variant};
use crate::error::{Error, Result};
use crate::rational::factorial;
use crate::symmpoly::{partitions, SymPoly, SymRing};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KrylovTable {
    pub k: usize,
    pub moments: Vec<Rational>,
}

impl KrylovTable {
    /// Hankel pair `M1 = (m_{i+j})`, `M2 = (m_{i+j+1})`, `0 <= i, j < n`.
    pub fn hankel(&self, n: usize) -> Result<GramPair> {
        if self.moments.len() < 2 * n {
            return Err(Error::SizeMismatch { expected: 2 * n, found: self.moments.len() });
        }
        let m1 = (0..n).map(|i| (0..n).map(|j| self.moments[i + j].clone()).collect()).collect();
        let m2 = (0..n).map(|i| (0..n).map(|j| self.moments[i + j + 1].clone()).collect()).collect();
        Ok(GramPair {
            variant: Variant::Plain { k: self.k },
            construction: Construction::Krylov { n },
            basis: Vec::new(),
            m1,
            m2,
        })
    }
}

/// Key: power of `u = 1 - t_1 - ... - t_k` followed by the sorted exponents of `t`.
type Key = Vec<u8>;

fn orbit_size(e: &[u8]) -> BigInt {
    let mut den = BigInt::from(1);
    let mut i = 0;
    while i < e.len() {
        let j = e[i..].iter().take_while(|&&v| v == e[i]).count();
        den *= factorial(j as u64);
        i += j;
    }
    factorial(e.len() as u64) / den
}

/// Exponent vectors of total degree `n` in `k` slots, sorted descending.
fn exponent_vectors(n: u32, k: usize) -> Vec<Vec<u8>> {
    partitions(n)
        .into_iter()
        .filter(|p| p.len() <= k)
        .map(|p| {
            let mut v: Vec<u8> = p.parts().iter().map(|&x| x as u8).collect();
            v.resize(k, 0);
            v
        })
        .collect()
}

/// `<L^i 1, 1>` for `i < count`.
///
/// Polynomials are kept in the divided-power monomials
/// `u^a/a! prod t_j^{e_j}/e_j!`, on which `L` acts with unit coefficients:
/// slot `j` sends `u^a/a! t_j^e/e!` to `(u + t_j)^{a+e+1}/(a+e+1)!`, and each
/// monomial integrates over `R_k` to `1/(a + sum e + k)!`.
pub fn krylov_moments(k: usize, count: usize) -> Result<KrylovTable> {
    if k < 2 || count == 0 {
        return Err(Error::InvalidInput("need k >= 2 and at least one moment".into()));
    }
    if count > 250 {
        return Err(Error::DegreeOverflow { degree: count as u32, cap: 250 });
    }
    let mut state: HashMap<Key, BigInt> = HashMap::new();
    let mut start = vec![0u8; k + 1];
    start[0] = 0;
    state.insert(start, BigInt::from(1));
    let mut moments = Vec::with_capacity(count);
    moments.push(Rational::new(BigInt::from(1), factorial(k as u64)));
    for i in 1..count as u32 {
        let mut next: HashMap<Key, BigInt> = HashMap::new();
        for p in 0..=i {
            for e in exponent_vectors(i - p, k) {
                let mut total = BigInt::zero();
                let mut idx = 0;
                while idx < k {
                    let v = e[idx];
                    let mult = e[idx..].iter().take_while(|&&x| x == v).count();
                    let n = p + v as u32;
                    if n >= 1 {
                        let mut sub = BigInt::zero();
                        let mut src = e.clone();
                        for x in 0..n {
                            src[idx] = x as u8;
                            let mut sorted = src.clone();
                            sorted.sort_unstable_by(|a, b| b.cmp(a));
                            let mut key = Vec::with_capacity(k + 1);
                            key.push((n - 1 - x) as u8);
                            key.extend_from_slice(&sorted);
                            if let Some(c) = state.get(&key) {
                                sub += c;
                            }
                        }
                        total += sub * BigInt::from(mult);
                    }
                    idx += mult;
                }
                if !total.is_zero() {
                    let mut key = Vec::with_capacity(k + 1);
                    key.push(p as u8);
                    key.extend_from_slice(&e);
                    next.insert(key, total);
                }
            }
        }
        state = next;
        let mut num = BigInt::zero();
        for (key, c) in &state {
            num += c * orbit_size(&key[1..]);
        }
        moments.push(Rational::new(num, factorial(i as u64 + k as u64)));
    }
    Ok(KrylovTable { k, moments })
}

/// Same moments through repeated `SymRing::apply_l` and simplex integration.
pub fn moments_by_operator(k: usize, count: usize) -> Result<Vec<Rational>> {
    let ring = SymRing::new(k, count as u32 + 1);
    let mut f = SymPoly::one(k);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        if i > 0 {
            f = ring.apply_l(&f)?;
        }
        out.push(ring.integrate_simplex(&f, &Rational::from_integer(BigInt::from(1)))?);
    }
    Ok(out)
}

/// Certified lower bound for `M_k` from the Krylov space `span{L^i 1 : i < n}`.
pub fn krylov_lower_bound(k: usize, n: usize, tol: f64) -> Result<BoundCertificate> {
    let table = krylov_moments(k, 2 * n)?;
    lower_bound(&table.hankel(n)?, tol)
}
