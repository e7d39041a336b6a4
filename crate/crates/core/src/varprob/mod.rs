//! Quadratic forms of the `M_k` and `M_{k,eps}` variational problems in a
//! symmetric polynomial basis, float eigen-solves and exact certificates.

mod cert;
mod krylov;

pub use cert::{parse_certificate, verify_certificate};
pub use krylov::{krylov_lower_bound, krylov_moments, moments_by_operator, KrylovTable};

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{best_convergent, binomial, factorial, floor_below, from_f64, pow, to_f64};
use crate::symmpoly::{partitions, simplex_moment, Signature, SymRing};
use crate::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// `(offset - P_(1))^a P_alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub a: u32,
    pub alpha: Signature,
    pub offset: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Variant {
    Plain { k: usize },
    Eps { k: usize, eps: Rational },
}

impl Variant {
    pub fn k(&self) -> usize {
        match self {
            Variant::Plain { k } | Variant::Eps { k, .. } => *k,
        }
    }

    /// Known upper bound for the quantity this variant bounds from below.
    pub fn upper_bound(&self) -> f64 {
        let k = self.k() as f64;
        match self {
            Variant::Plain { .. } => k / (k - 1.0) * k.ln(),
            Variant::Eps { .. } => k / (k - 1.0) * (2.0 * k - 1.0).ln(),
        }
    }
}

/// How the basis was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Gram { d: u32, full: bool },
    Krylov { n: usize },
    Custom,
}

#[derive(Clone, Debug)]
pub struct GramPair {
    pub variant: Variant,
    pub construction: Construction,
    pub basis: Vec<BasisElement>,
    pub m1: Matrix,
    pub m2: Matrix,
}

impl GramPair {
    pub fn from_matrices(variant: Variant, m1: Matrix, m2: Matrix) -> Result<Self> {
        let n = m1.len();
        if m2.len() != n || m1.iter().chain(&m2).any(|r| r.len() != n) {
            return Err(Error::SizeMismatch { expected: n, found: m2.len() });
        }
        Ok(GramPair { variant, construction: Construction::Custom, basis: Vec::new(), m1, m2 })
    }

    pub fn dim(&self) -> usize {
        self.m1.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCertificate {
    pub variant: Variant,
    pub construction: Construction,
    pub a: Vec<Rational>,
    pub c: Rational,
    pub verified: bool,
}

/// Basis `(offset - P_(1))^a P_alpha` with `alpha` free of 1's (even parts only
/// unless `full`), at most `k` parts, and `a + deg(alpha) <= d`.
pub fn basis(k: usize, d: u32, full: bool, offset: &Rational) -> Vec<BasisElement> {
    let mut out = Vec::new();
    for deg in 0..=d {
        for alpha in partitions(deg) {
            let ok = alpha.len() <= k && alpha.parts().iter().all(|&p| p >= 2 && (full || p % 2 == 0));
            if !ok {
                continue;
            }
            for a in 0..=(d - deg) {
                out.push(BasisElement { a, alpha: alpha.clone(), offset: offset.clone() });
            }
        }
    }
    out.sort_by(|x, y| (x.a + x.alpha.degree(), &x.alpha, x.a).cmp(&(y.a + y.alpha.degree(), &y.alpha, y.a)));
    out
}

/// `int_{outer R_n} (o - P_(1))^A P_gamma dt`, expanding `o - P_(1) = (o - outer) + (outer - P_(1))`.
fn shifted_moment(n: usize, big_a: u32, gamma: &Signature, o: &Rational, outer: &Rational) -> Rational {
    let dims = gamma.degree() + n as u32;
    if o == outer {
        return simplex_moment(n, big_a, gamma) * pow(outer, big_a + dims);
    }
    let gap = o - outer;
    (0..=big_a)
        .map(|r| {
            Rational::from(binomial(big_a as u64, r as u64))
                * pow(&gap, big_a - r)
                * pow(outer, r + dims)
                * simplex_moment(n, r, gamma)
        })
        .fold(Rational::zero(), |x, y| x + y)
}

/// `int_0^{o - sum_{j<k} t_j} b dt_k` as `sum w (o - P_(1))^p P_beta` in `k - 1` variables.
fn fiber_integral(k: usize, b: &BasisElement) -> Vec<(u32, Signature, Rational)> {
    let mut slots: Vec<u32> = b.alpha.parts().to_vec();
    slots.dedup();
    if b.alpha.len() < k {
        slots.push(0);
    }
    slots
        .into_iter()
        .filter_map(|m| {
            let rest = b.alpha.remove_part(m)?;
            if rest.len() > k - 1 {
                return None;
            }
            let w = Rational::new(
                factorial(b.a as u64) * factorial(m as u64),
                factorial(b.a as u64 + m as u64 + 1),
            );
            Some((b.a + m + 1, rest, w))
        })
        .collect()
}

fn assemble(variant: Variant, d: u32, full: bool) -> Result<GramPair> {
    let k = variant.k();
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let (offset, outer) = match &variant {
        Variant::Plain { .. } => (Rational::one(), Rational::one()),
        Variant::Eps { eps, .. } => {
            if !(eps.is_positive() && eps < &Rational::one()) {
                return Err(Error::InvalidInput("eps must lie in (0, 1)".into()));
            }
            (Rational::one() + eps, Rational::one() - eps)
        }
    };
    let basis = basis(k, d, full, &offset);
    let ring = SymRing::new(k, 2 * d + 2);
    let fibers: Vec<_> = basis.iter().map(|b| fiber_integral(k, b)).collect();
    let n = basis.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let entries: Vec<(Rational, Rational)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (bi, bj) = (&basis[i], &basis[j]);
            let mut e1 = Rational::zero();
            for (gamma, c) in ring.structure_constants(&bi.alpha, &bj.alpha).iter() {
                if gamma.len() <= k {
                    e1 += Rational::from(c.clone()) * shifted_moment(k, bi.a + bj.a, gamma, &offset, &offset);
                }
            }
            let mut e2 = Rational::zero();
            for (p, beta, w) in &fibers[i] {
                for (q, beta2, w2) in &fibers[j] {
                    let ww = w * w2;
                    for (gamma, c) in ring.structure_constants(beta, beta2).iter() {
                        if gamma.len() < k {
                            e2 += &ww * Rational::from(c.clone()) * shifted_moment(k - 1, p + q, gamma, &offset, &outer);
                        }
                    }
                }
            }
            e2 *= Rational::from_integer(BigInt::from(k));
            (e1, e2)
        })
        .collect();
    let mut m1 = vec![vec![Rational::zero(); n]; n];
    let mut m2 = m1.clone();
    for (&(i, j), (e1, e2)) in pairs.iter().zip(entries) {
        m1[i][j] = e1.clone();
        m1[j][i] = e1;
        m2[i][j] = e2.clone();
        m2[j][i] = e2;
    }
    let keep = independent_subset(&m1)?;
    let pick = |m: &Matrix| -> Matrix { keep.iter().map(|&i| keep.iter().map(|&j| m[i][j].clone()).collect()).collect() };
    let (m1, m2) = (pick(&m1), pick(&m2));
    let basis = keep.iter().map(|&i| basis[i].clone()).collect();
    Ok(GramPair { variant, construction: Construction::Gram { d, full }, basis, m1, m2 })
}

/// Indices of a maximal linearly independent prefix-greedy subset of the
/// basis: an element is dropped when its exact LDL pivot against the kept
/// elements vanishes (in few variables the monomial family is dependent).
fn independent_subset(m: &Matrix) -> Result<Vec<usize>> {
    let n = m.len();
    let mut keep: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new(); // L rows over kept indices
    let mut piv: Vec<Rational> = Vec::new();
    for j in 0..n {
        let mut row: Vec<Rational> = Vec::with_capacity(keep.len());
        for (t, &i) in keep.iter().enumerate() {
            let mut s = m[j][i].clone();
            for p in 0..t {
                s -= &row[p] * &rows[t][p] * &piv[p];
            }
            row.push(s / &piv[t]);
        }
        let mut dj = m[j][j].clone();
        for p in 0..keep.len() {
            dj -= &row[p] * &row[p] * &piv[p];
        }
        if dj.is_negative() {
            return Err(Error::NotPositiveDefinite);
        }
        if dj.is_positive() {
            keep.push(j);
            rows.push(row);
            piv.push(dj);
        }
    }
    Ok(keep)
}

/// Gram pair for `M_k` over the even-signature basis of degree `<= d`.
pub fn assemble_plain(k: usize, d: u32) -> Result<GramPair> {
    assemble(Variant::Plain { k }, d, false)
}

pub fn assemble_plain_with(k: usize, d: u32, full: bool) -> Result<GramPair> {
    assemble(Variant::Plain { k }, d, full)
}

/// Gram pair for `M_{k,eps}`: `I` over `(1+eps)R_k`, `J` with outer region `(1-eps)R_{k-1}`.
pub fn assemble_eps(k: usize, d: u32, eps: &Rational) -> Result<GramPair> {
    assemble(Variant::Eps { k, eps: eps.clone() }, d, false)
}

pub fn assemble_eps_with(k: usize, d: u32, eps: &Rational, full: bool) -> Result<GramPair> {
    assemble(Variant::Eps { k, eps: eps.clone() }, d, full)
}

/// Exact `M = L D L^T` with unit lower triangular `L`.
#[derive(Clone, Debug)]
pub struct Ldl {
    pub l: Matrix,
    pub d: Vec<Rational>,
}

/// Fails with `NotPositiveDefinite` unless every pivot is positive, which
/// proves positive definiteness.
pub fn ldl(m: &Matrix) -> Result<Ldl> {
    let n = m.len();
    let mut l = vec![vec![Rational::zero(); n]; n];
    let mut d: Vec<Rational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = m[j][j].clone();
        for p in 0..j {
            dj -= &l[j][p] * &l[j][p] * &d[p];
        }
        if !dj.is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        l[j][j] = Rational::one();
        for i in j + 1..n {
            let mut s = m[i][j].clone();
            for p in 0..j {
                s -= &l[i][p] * &l[j][p] * &d[p];
            }
            l[i][j] = s / &dj;
        }
        d.push(dj);
    }
    Ok(Ldl { l, d })
}

/// Solves `L x = b` for unit lower triangular `L`.
fn forward(l: &Matrix, b: &[Rational]) -> Vec<Rational> {
    let mut x: Vec<Rational> = Vec::with_capacity(b.len());
    for i in 0..b.len() {
        let mut s = b[i].clone();
        for (p, xp) in x.iter().enumerate() {
            if !l[i][p].is_zero() {
                s -= &l[i][p] * xp;
            }
        }
        x.push(s);
    }
    x
}

/// Solves `L^T x = y`.
fn backward_t(l: &Matrix, y: &[Rational]) -> Vec<Rational> {
    let n = y.len();
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i].clone();
        for j in i + 1..n {
            if !l[j][i].is_zero() {
                s -= &l[j][i] * &x[j];
            }
        }
        x[i] = s;
    }
    x
}

/// Approximates `1/sqrt(q)` by a dyadic rational, safe for tiny `q`.
fn inv_sqrt_approx(q: &Rational) -> Rational {
    let e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let half = e.div_euclid(2);
    let two = Rational::from_integer(BigInt::from(2));
    let scale = |h: i64| {
        if h >= 0 {
            pow(&two, h as u32)
        } else {
            pow(&two, (-h) as u32).recip()
        }
    };
    let mantissa = to_f64(&(q * scale(-2 * half)));
    from_f64(1.0 / mantissa.sqrt()).expect("finite") * scale(-half)
}

/// The problem in coordinates where `M1` becomes the identity (up to the
/// rounding in `r`): `W = R L^{-1} M2 L^{-T} R` with `R = diag(r)`, `r ~ D^{-1/2}`.
struct Whitened {
    ldl: Ldl,
    x: Matrix,
    r: Vec<Rational>,
    w: DMatrix<f64>,
}

fn whiten(g: &GramPair) -> Result<Whitened> {
    let ldl = ldl(&g.m1)?;
    let n = g.dim();
    let cols: Vec<Vec<Rational>> = (0..n).into_par_iter().map(|j| {
        let col: Vec<Rational> = (0..n).map(|i| g.m2[i][j].clone()).collect();
        forward(&ldl.l, &col)
    }).collect();
    // cols[j] = column j of L^{-1} M2; X = L^{-1} (L^{-1} M2)^T
    let x_cols: Vec<Vec<Rational>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let row_j: Vec<Rational> = (0..n).map(|c| cols[c][j].clone()).collect();
            forward(&ldl.l, &row_j)
        })
        .collect();
    let x: Matrix = (0..n).map(|i| (0..n).map(|j| x_cols[j][i].clone()).collect()).collect();
    let r: Vec<Rational> = ldl.d.iter().map(inv_sqrt_approx).collect();
    let w = DMatrix::from_fn(n, n, |i, j| {
        let v = to_f64(&(&x[i][j] * &r[i] * &r[j]));
        let vt = to_f64(&(&x[j][i] * &r[j] * &r[i]));
        (v + vt) / 2.0
    });
    Ok(Whitened { ldl, x, r, w })
}

/// Largest eigenpair of the whitened matrix.
fn top_eigen(w: &DMatrix<f64>, tol: f64) -> Result<(f64, Vec<f64>)> {
    let n = w.nrows();
    let eig = SymmetricEigen::try_new(w.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::NoConvergence("symmetric eigensolver".into()))?;
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::NoConvergence("empty matrix".into()))?;
    let z: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    let zv = nalgebra::DVector::from_vec(z.clone());
    let resid = (w * &zv - &zv * lambda).norm();
    if resid > tol.max(1e-13) * lambda.abs().max(1.0) {
        return Err(Error::NoConvergence(format!("residual {resid:e}")));
    }
    Ok((lambda, z))
}

/// Advisory float solution `(C, a)` of `M2 a = C M1 a` for the largest `C`;
/// `a` is normalized to unit max-norm.
pub fn solve_generalized(g: &GramPair, tol: f64) -> Result<(f64, Vec<f64>)> {
    let wh = whiten(g)?;
    let (lambda, z) = top_eigen(&wh.w, tol)?;
    let a = back_transform(&wh, &z, 1_000_000_000_000);
    let max = a.iter().map(|v| v.abs()).fold(Rational::zero(), |m, v| if v > m { v } else { m });
    let a_f = if max.is_zero() { vec![0.0; a.len()] } else { a.iter().map(|v| to_f64(&(v / &max))).collect() };
    Ok((lambda, a_f))
}

fn back_transform(wh: &Whitened, z: &[f64], bound: u64) -> Vec<Rational> {
    let zq = rationalize(z, bound);
    let y: Vec<Rational> = zq.iter().zip(&wh.r).map(|(a, b)| a * b).collect();
    backward_t(&wh.ldl.l, &y)
}

/// Per-coordinate continued-fraction convergent with denominator `<= bound`.
pub fn rationalize(a: &[f64], denominator_bound: u64) -> Vec<Rational> {
    a.iter().map(|&x| best_convergent(x, denominator_bound)).collect()
}

fn quad_form(m: &Matrix, a: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let mut row = Rational::zero();
        for (j, aj) in a.iter().enumerate() {
            if !aj.is_zero() {
                row += &m[i][j] * aj;
            }
        }
        s += row * ai;
    }
    s
}

/// Exact check of `a^T M2 a - C a^T M1 a > 0` and `a^T M1 a > 0`.
pub fn certify(g: &GramPair, a: &[Rational], c: &Rational) -> BoundCertificate {
    let verified = a.len() == g.dim() && {
        let q1 = quad_form(&g.m1, a);
        let q2 = quad_form(&g.m2, a);
        q1.is_positive() && (q2 - c * q1).is_positive()
    };
    BoundCertificate {
        variant: g.variant.clone(),
        construction: g.construction.clone(),
        a: a.to_vec(),
        c: c.clone(),
        verified,
    }
}

/// Solve, rationalize, round `C` down and certify, with a retry ladder.
pub fn lower_bound(g: &GramPair, tol: f64) -> Result<BoundCertificate> {
    let wh = whiten(g)?;
    let (_, z) = top_eigen(&wh.w, tol)?;
    let grid = BigInt::from(1_000_000_000_000u64);
    let step = Rational::new(BigInt::one(), BigInt::from(1_000_000));
    for bound in [1_000_000u64, 1_000_000_000] {
        let a = back_transform(&wh, &z, bound);
        // Rayleigh quotient through the factorization
        let y = {
            let mut y = vec![Rational::zero(); a.len()];
            for (i, yi) in y.iter_mut().enumerate() {
                let mut s = a[i].clone();
                for j in i + 1..a.len() {
                    s += &wh.ldl.l[j][i] * &a[j];
                }
                *yi = s;
            }
            y
        };
        let den: Rational = y.iter().zip(&wh.ldl.d).map(|(v, d)| v * v * d).fold(Rational::zero(), |s, v| s + v);
        if !den.is_positive() {
            continue;
        }
        let num = quad_form(&wh.x, &y);
        let mut c = floor_below(&(num / den), &grid);
        for _ in 0..10 {
            let cert = certify(g, &a, &c);
            if cert.verified {
                return Ok(cert);
            }
            c -= &step;
        }
    }
    Err(Error::Unverified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn whitening_inverse_sqrt() {
        for q in [ratio(2, 1), ratio(1, 3), Rational::new(BigInt::one(), BigInt::from(10).pow(400))] {
            let r = inv_sqrt_approx(&q);
            let prod = &r * &r * &q;
            assert!((to_f64(&prod) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ldl_detects_indefinite() {
        let m = vec![vec![ratio(1, 1), ratio(2, 1)], vec![ratio(2, 1), ratio(1, 1)]];
        assert!(matches!(ldl(&m), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn fiber_weights() {
        let b = BasisElement { a: 2, alpha: Signature::new(vec![2]), offset: Rational::one() };
        let f = fiber_integral(3, &b);
        // m = 2: 2! 2! / 5! = 1/30 ; m = 0: 2!/3! = 1/3
        assert_eq!(f, vec![(5, Signature::empty(), ratio(1, 30)), (3, Signature::new(vec![2]), ratio(1, 3))]);
    }
}
