use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use primegaps::rational::{factorial, int, ratio};
use primegaps::symmpoly::*;
use primegaps::Rational;
use proptest::prelude::*;

/// Dense polynomial in k variables, exponent vector -> coefficient.
#[derive(Clone, Debug, PartialEq)]
struct Dense {
    k: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Dense {
    fn zero(k: usize) -> Self {
        Dense { k, terms: BTreeMap::new() }
    }

    fn constant(k: usize, c: Rational) -> Self {
        let mut d = Dense::zero(k);
        d.add(vec![0; k], c);
        d
    }

    fn var(k: usize, i: usize) -> Self {
        let mut e = vec![0; k];
        e[i] = 1;
        let mut d = Dense::zero(k);
        d.add(e, Rational::one());
        d
    }

    fn add(&mut self, e: Vec<u32>, c: Rational) {
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    fn plus(&self, o: &Dense) -> Dense {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add(e.clone(), c.clone());
        }
        r
    }

    fn times(&self, o: &Dense) -> Dense {
        let mut r = Dense::zero(self.k);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add(e, c1 * c2);
            }
        }
        r
    }

    fn pow(&self, n: u32) -> Dense {
        let mut r = Dense::constant(self.k, Rational::one());
        for _ in 0..n {
            r = r.times(self);
        }
        r
    }

    fn scale(&self, c: &Rational) -> Dense {
        let mut r = Dense::zero(self.k);
        for (e, v) in &self.terms {
            r.add(e.clone(), v * c);
        }
        r
    }

    /// `1 - sum of t_j for j in vars`.
    fn one_minus(k: usize, vars: impl Iterator<Item = usize>) -> Dense {
        let mut r = Dense::constant(k, Rational::one());
        for j in vars {
            r = r.plus(&Dense::var(k, j).scale(&int(-1)));
        }
        r
    }

    /// `int_0^{upper} self dt_i`, with `upper` free of `t_i`.
    fn integrate_var(&self, i: usize, upper: &Dense) -> Dense {
        let mut r = Dense::zero(self.k);
        for (e, c) in &self.terms {
            let n = e[i] + 1;
            let mut rest = e.clone();
            rest[i] = 0;
            let mut mono = Dense::zero(self.k);
            mono.add(rest, c / int(n as i64));
            r = r.plus(&mono.times(&upper.pow(n)));
        }
        r
    }

    /// Iterated integral over the unit simplex: t_k first, t_1 last.
    fn integrate_simplex(&self) -> Rational {
        let mut f = self.clone();
        for i in (0..self.k).rev() {
            f = f.integrate_var(i, &Dense::one_minus(self.k, 0..i));
        }
        f.terms.get(&vec![0; self.k]).cloned().unwrap_or_else(Rational::zero)
    }
}

/// All distinct permutations of `alpha` padded to `k` slots.
fn expand_signature(k: usize, alpha: &Signature) -> Dense {
    let mut parts: Vec<u32> = alpha.parts().to_vec();
    parts.resize(k, 0);
    parts.sort_unstable();
    let mut out = Dense::zero(k);
    loop {
        out.add(parts.clone(), Rational::one());
        // next lexicographic permutation
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| parts[i] < parts[i + 1]) else { break };
        let j = (i + 1..k).rev().find(|&j| parts[j] > parts[i]).unwrap();
        parts.swap(i, j);
        parts[i + 1..].reverse();
    }
    out
}

fn expand(f: &SymPoly) -> Dense {
    let mut out = Dense::zero(f.k());
    for (alpha, c) in f.terms() {
        out = out.plus(&expand_signature(f.k(), alpha).scale(c));
    }
    out
}

fn sig(p: &[u32]) -> Signature {
    Signature::new(p.to_vec())
}

fn fact(n: u64) -> Rational {
    Rational::from_integer(factorial(n))
}

#[test]
fn beta_integral_matches_iterated_integration() {
    for k in 1..=4usize {
        let total = 4usize.pow(k as u32);
        for code in 0..total {
            let exps: Vec<u32> = (0..k).map(|i| ((code / 4usize.pow(i as u32)) % 4) as u32).collect();
            for a in 0..=3u32 {
                let mut f = Dense::one_minus(k, 0..k).pow(a);
                for (i, &e) in exps.iter().enumerate() {
                    f = f.times(&Dense::var(k, i).pow(e));
                }
                assert_eq!(beta_integral(a, &exps), f.integrate_simplex(), "k={k} a={a} e={exps:?}");
            }
        }
    }
    assert_eq!(beta_integral(0, &[0]), Rational::one());
    assert_eq!(beta_integral(1, &[1]), ratio(1, 6));
    for k in 1..8 {
        assert_eq!(beta_integral(0, &vec![0; k]), fact(k as u64).recip());
    }
}

#[test]
fn products_of_small_signatures() {
    let ring = SymRing::new(3, 8);
    let p1 = SymPoly::p1(3);
    let sq = ring.multiply(&p1, &p1).unwrap();
    let mut want = SymPoly::zero(3);
    want.add_term(sig(&[2]), int(1));
    want.add_term(sig(&[1, 1]), int(2));
    assert_eq!(sq, want);

    let p2 = SymPoly::monomial(3, sig(&[2])).unwrap();
    let mut want = SymPoly::zero(3);
    want.add_term(sig(&[3]), int(1));
    want.add_term(sig(&[2, 1]), int(1));
    assert_eq!(ring.multiply(&p1, &p2).unwrap(), want);

    let ring2 = SymRing::new(2, 8);
    let p11 = SymPoly::monomial(2, sig(&[1, 1])).unwrap();
    assert_eq!(ring2.multiply(&SymPoly::p1(2), &p11).unwrap(), SymPoly::monomial(2, sig(&[2, 1])).unwrap());
    assert!(SymPoly::monomial(2, sig(&[1, 1, 1])).is_err());
}

#[test]
fn structure_constants_match_expansion() {
    for k in 1..=4usize {
        let ring = SymRing::new(k, 8);
        let sigs: Vec<Signature> = (0..=3).flat_map(partitions).filter(|s| s.len() <= k).collect();
        for a in &sigs {
            for b in &sigs {
                let fa = SymPoly::monomial(k, a.clone()).unwrap();
                let fb = SymPoly::monomial(k, b.clone()).unwrap();
                let prod = ring.multiply(&fa, &fb).unwrap();
                assert_eq!(expand(&prod), expand(&fa).times(&expand(&fb)), "k={k} {a} * {b}");
            }
        }
    }
}

#[test]
fn integrate_simplex_examples() {
    let ring = SymRing::new(3, 4);
    assert_eq!(ring.integrate_simplex(&SymPoly::one(3), &ratio(3, 2)).unwrap(), ratio(9, 16));
    let ring2 = SymRing::new(2, 4);
    assert_eq!(ring2.integrate_simplex(&SymPoly::p1(2), &Rational::one()).unwrap(), ratio(1, 3));
    assert_eq!(expand(&SymPoly::p1(2)).integrate_simplex(), ratio(1, 3));
    assert!(ring.integrate_simplex(&SymPoly::one(3), &Rational::zero()).is_err());
    for k in 1..=6usize {
        let r = SymRing::new(k, 2);
        assert_eq!(r.integrate_simplex(&SymPoly::one(k), &Rational::one()).unwrap(), fact(k as u64).recip());
    }
}

#[test]
fn operator_identities() {
    for k in 1..=5usize {
        let ring = SymRing::new(k, 6);
        let kk = int(k as i64);
        let l1 = ring.apply_l(&SymPoly::one(k)).unwrap();
        let want = SymPoly::constant(k, kk.clone()).sub(&SymPoly::p1(k).scale(&(&kk - int(1))));
        assert_eq!(l1, want, "k={k}");
        if k >= 2 {
            let lp = ring.apply_l(&SymPoly::p1(k)).unwrap();
            let mut want = SymPoly::constant(k, &kk / int(2));
            want.add_term(sig(&[2]), -(&kk - int(1)) / int(2));
            want.add_term(sig(&[1, 1]), -(&kk - int(2)));
            assert_eq!(lp, want, "k={k}");
        }
    }
}

/// `L f` computed on the dense expansion, slot by slot.
fn dense_l(f: &Dense) -> Dense {
    let k = f.k;
    let mut out = Dense::zero(k);
    for i in 0..k {
        let upper = Dense::one_minus(k, (0..k).filter(|&j| j != i));
        out = out.plus(&f.integrate_var(i, &upper));
    }
    out
}

#[test]
fn operator_matches_dense_route() {
    for k in 1..=4usize {
        let ring = SymRing::new(k, 6);
        for alpha in (0..=3).flat_map(partitions).filter(|s| s.len() <= k) {
            let f = SymPoly::monomial(k, alpha.clone()).unwrap();
            assert_eq!(expand(&ring.apply_l(&f).unwrap()), dense_l(&expand(&f)), "k={k} {alpha}");
        }
    }
}

#[test]
fn krylov_inner_products() {
    for k in 2..=10usize {
        let ring = SymRing::new(k, 4);
        let kk = int(k as i64);
        let one = SymPoly::one(k);
        let l1 = ring.apply_l(&one).unwrap();
        let l2 = ring.apply_l(&l1).unwrap();
        let l3 = ring.apply_l(&l2).unwrap();
        let kb = k as u64;
        assert_eq!(ring.inner_product(&one, &one).unwrap(), fact(kb).recip());
        assert_eq!(ring.inner_product(&l1, &one).unwrap(), int(2) * &kk / fact(kb + 1));
        assert_eq!(ring.inner_product(&l2, &one).unwrap(), &kk * (int(5) * &kk + int(1)) / fact(kb + 2));
        let closed = int(2) * &kk * &kk * (int(7) * &kk + int(5)) / fact(kb + 3);
        assert_eq!(ring.inner_product(&l3, &one).unwrap(), closed, "k={k}");
        assert_eq!(ring.inner_product(&l2, &l1).unwrap(), closed);
    }
}

#[test]
fn degree_cap_is_enforced() {
    let ring = SymRing::new(3, 3);
    let p2 = SymPoly::monomial(3, sig(&[2])).unwrap();
    assert!(ring.multiply(&p2, &p2).is_err());
    let p3 = SymPoly::monomial(3, sig(&[3])).unwrap();
    assert!(ring.apply_l(&p3).is_err());
}

#[test]
fn dump_format() {
    let mut f = SymPoly::zero(2);
    f.add_term(sig(&[2, 1]), ratio(-3, 4));
    f.add_term(Signature::empty(), int(2));
    let text = f.to_string();
    assert!(text.contains("P[2,1]") && text.contains("-3/4"), "{text}");
    assert_eq!(sig(&[1, 3, 2]).parts(), &[3, 2, 1]);
    assert_eq!(sig(&[2, 2, 1]).monomial_count(4), BigInt::from(12));
}

fn arb_poly(k: usize, max_deg: u32) -> impl Strategy<Value = SymPoly> {
    let sigs: Vec<Signature> = (0..=max_deg).flat_map(partitions).filter(|s| s.len() <= k).collect();
    let n = sigs.len();
    prop::collection::vec((-6i64..=6, 1i64..=4), n).prop_map(move |cs| {
        let mut f = SymPoly::zero(k);
        for (s, (p, q)) in sigs.iter().zip(cs) {
            f.add_term(s.clone(), ratio(p, q));
        }
        f
    })
}

fn arb_case() -> impl Strategy<Value = (usize, SymPoly, SymPoly, SymPoly)> {
    (1usize..=4).prop_flat_map(|k| (Just(k), arb_poly(k, 2), arb_poly(k, 2), arb_poly(k, 2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiply_commutes_and_associates((k, f, g, h) in arb_case()) {
        let ring = SymRing::new(k, 6);
        let fg = ring.multiply(&f, &g).unwrap();
        prop_assert_eq!(&fg, &ring.multiply(&g, &f).unwrap());
        let left = ring.multiply(&fg, &h).unwrap();
        let right = ring.multiply(&f, &ring.multiply(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn operator_is_linear((k, f, g, _h) in arb_case(), a in -5i64..5, b in 1i64..5) {
        let ring = SymRing::new(k, 6);
        let (a, b) = (ratio(a, 3), ratio(b, 7));
        let lhs = ring.apply_l(&f.scale(&a).add(&g.scale(&b))).unwrap();
        let rhs = ring.apply_l(&f).unwrap().scale(&a).add(&ring.apply_l(&g).unwrap().scale(&b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn operator_is_self_adjoint((k, f, g, _h) in arb_case()) {
        let ring = SymRing::new(k, 6);
        let lf = ring.apply_l(&f).unwrap();
        let lg = ring.apply_l(&g).unwrap();
        prop_assert_eq!(ring.inner_product(&lf, &g).unwrap(), ring.inner_product(&f, &lg).unwrap());
        prop_assert!(ring.inner_product(&lf, &f).unwrap() >= Rational::zero());
    }
}
