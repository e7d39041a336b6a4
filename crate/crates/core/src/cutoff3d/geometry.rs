//! Polytopes cut out by rational half-spaces: vertex enumeration, exact
//! volume and exact polynomial integrals by tetrahedral decomposition.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::poly::Poly3;
use crate::rational::{factorial, int};
use crate::Rational;

type Point = [Rational; 3];

/// `a . v < b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub a: [Rational; 3],
    pub b: Rational,
}

impl Halfspace {
    pub fn new(a: [Rational; 3], b: Rational) -> Self {
        Halfspace { a, b }
    }

    fn value(&self, v: &Point) -> Rational {
        &self.a[0] * &v[0] + &self.a[1] * &v[1] + &self.a[2] * &v[2]
    }

    /// Scaled so the first nonzero entry of `(a, b)` has absolute value 1.
    fn normalized(&self) -> Halfspace {
        let lead = self.a.iter().chain(std::iter::once(&self.b)).find(|c| !c.is_zero()).cloned();
        match lead {
            Some(l) => {
                let s = l.abs().recip();
                Halfspace { a: [&self.a[0] * &s, &self.a[1] * &s, &self.a[2] * &s], b: &self.b * &s }
            }
            None => self.clone(),
        }
    }

    /// Same inequality on `v` with coordinates relabelled: holds at `v` iff
    /// `self` holds at `(v[s[0]], v[s[1]], v[s[2]])`.
    pub fn permute(&self, s: [usize; 3]) -> Halfspace {
        let mut a = [Rational::zero(), Rational::zero(), Rational::zero()];
        for i in 0..3 {
            a[s[i]] = self.a[i].clone();
        }
        Halfspace { a, b: self.b.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope3 {
    pub name: String,
    pub halfspaces: Vec<Halfspace>,
}

impl Polytope3 {
    pub fn new(name: impl Into<String>, halfspaces: Vec<Halfspace>) -> Self {
        Polytope3 { name: name.into(), halfspaces }
    }

    /// Strict interior membership.
    pub fn contains(&self, v: &Point) -> bool {
        self.halfspaces.iter().all(|h| h.value(v) < h.b)
    }

    pub fn contains_f64(&self, v: [f64; 3]) -> bool {
        self.halfspaces.iter().all(|h| {
            let a: Vec<f64> = h.a.iter().map(crate::rational::to_f64).collect();
            a[0] * v[0] + a[1] * v[1] + a[2] * v[2] < crate::rational::to_f64(&h.b)
        })
    }

    pub fn intersect(&self, other: &Polytope3) -> Polytope3 {
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.iter().cloned());
        Polytope3::new(format!("{}&{}", self.name, other.name), hs)
    }

    /// Vertices of the closure.
    pub fn vertices(&self) -> Vec<Point> {
        let hs = distinct(&self.halfspaces);
        let mut out: Vec<Point> = Vec::new();
        for i in 0..hs.len() {
            for j in i + 1..hs.len() {
                for k in j + 1..hs.len() {
                    let Some(p) = solve3(&hs[i], &hs[j], &hs[k]) else { continue };
                    if hs.iter().all(|h| h.value(&p) <= h.b) && !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    /// Tetrahedra covering the closure, as vertex quadruples.
    pub fn tetrahedra(&self) -> Vec<[Point; 4]> {
        let verts = self.vertices();
        if verts.len() < 4 {
            return Vec::new();
        }
        let n = int(verts.len() as i64);
        let centre: Point = std::array::from_fn(|i| verts.iter().map(|v| v[i].clone()).sum::<Rational>() / &n);
        let mut out = Vec::new();
        for h in distinct(&self.halfspaces) {
            let face: Vec<&Point> = verts.iter().filter(|v| h.value(v) == h.b).collect();
            if face.len() < 3 {
                continue;
            }
            for tri in fan(&face, &h.a) {
                let t = [centre.clone(), tri[0].clone(), tri[1].clone(), tri[2].clone()];
                if !det(&t).is_zero() {
                    out.push(t);
                }
            }
        }
        out
    }

    pub fn volume(&self) -> Rational {
        self.tetrahedra().iter().map(|t| det(t).abs() / int(6)).sum()
    }

    /// Exact `int_P f`.
    pub fn integrate(&self, f: &Poly3) -> Rational {
        self.tetrahedra().iter().map(|t| integrate_tetrahedron(t, f)).sum()
    }
}

fn distinct(hs: &[Halfspace]) -> Vec<Halfspace> {
    let mut out: Vec<Halfspace> = Vec::new();
    for h in hs {
        let n = h.normalized();
        if !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

fn sub(a: &Point, b: &Point) -> Point {
    std::array::from_fn(|i| &a[i] - &b[i])
}

fn cross(a: &Point, b: &Point) -> Point {
    [&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

fn dot(a: &Point, b: &Point) -> Rational {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn det(t: &[Point; 4]) -> Rational {
    let (u, v, w) = (sub(&t[1], &t[0]), sub(&t[2], &t[0]), sub(&t[3], &t[0]));
    dot(&u, &cross(&v, &w))
}

fn solve3(p: &Halfspace, q: &Halfspace, r: &Halfspace) -> Option<Point> {
    let d = dot(&p.a, &cross(&q.a, &r.a));
    if d.is_zero() {
        return None;
    }
    // Cramer's rule in the form x = (b_p (q x r) + b_q (r x p) + b_r (p x q)) / d
    let (qr, rp, pq) = (cross(&q.a, &r.a), cross(&r.a, &p.a), cross(&p.a, &q.a));
    Some(std::array::from_fn(|i| (&p.b * &qr[i] + &q.b * &rp[i] + &r.b * &pq[i]) / &d))
}

/// Fan triangulation of a convex planar polygon with normal `normal`.
fn fan(face: &[&Point], normal: &Point) -> Vec<[Point; 3]> {
    let n = int(face.len() as i64);
    let c: Point = std::array::from_fn(|i| face.iter().map(|v| v[i].clone()).sum::<Rational>() / &n);
    let r0 = sub(face[0], &c);
    let half = |u: &Point| -> u8 {
        let s = dot(normal, &cross(&r0, u));
        if s.is_positive() || (s.is_zero() && dot(&r0, u).is_positive()) {
            0
        } else {
            1
        }
    };
    let mut ring: Vec<(u8, Point, &Point)> = face.iter().map(|v| {
        let u = sub(v, &c);
        (half(&u), u, *v)
    }).collect();
    ring.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            let s = dot(normal, &cross(&a.1, &b.1));
            if s.is_positive() {
                Ordering::Less
            } else if s.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    });
    (1..ring.len() - 1)
        .map(|i| [ring[0].2.clone(), ring[i].2.clone(), ring[i + 1].2.clone()])
        .collect()
}

/// `int_T f` through the affine map from the standard simplex, where each
/// monomial `l1^a l2^b l3^c` integrates to `a! b! c! / (a+b+c+3)!`.
fn integrate_tetrahedron(t: &[Point; 4], f: &Poly3) -> Rational {
    let jac = det(t).abs();
    if jac.is_zero() {
        return Rational::zero();
    }
    // coordinate i as an affine polynomial in (l1, l2, l3)
    let coord: Vec<Poly3> = (0..3)
        .map(|i| {
            let mut p = Poly3::constant(t[0][i].clone());
            for j in 0..3 {
                p = p.add(&Poly3::var(j).scale(&(&t[j + 1][i] - &t[0][i])));
            }
            p
        })
        .collect();
    let mut g = Poly3::zero();
    for (e, c) in f.terms() {
        let mut m = Poly3::constant(c.clone());
        for i in 0..3 {
            m = m.mul(&coord[i].pow(e[i]));
        }
        g = g.add(&m);
    }
    let mut s = Rational::zero();
    for (e, c) in g.terms() {
        let num = factorial(e[0] as u64) * factorial(e[1] as u64) * factorial(e[2] as u64);
        s += c * Rational::new(num, factorial((e[0] + e[1] + e[2] + 3) as u64));
    }
    s * jac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use num_traits::One;

    fn cube() -> Polytope3 {
        let z = Rational::zero;
        let o = Rational::one;
        let hs = vec![
            Halfspace::new([-o(), z(), z()], z()),
            Halfspace::new([z(), -o(), z()], z()),
            Halfspace::new([z(), z(), -o()], z()),
            Halfspace::new([o(), z(), z()], o()),
            Halfspace::new([z(), o(), z()], o()),
            Halfspace::new([z(), z(), o()], o()),
        ];
        Polytope3::new("cube", hs)
    }

    #[test]
    fn cube_volume_and_moments() {
        let c = cube();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.volume(), Rational::one());
        let e = Rational::zero();
        assert_eq!(c.integrate(&Poly3::parse("x^2y", &e).unwrap()), ratio(1, 6));
        assert!(c.contains(&[ratio(1, 2), ratio(1, 3), ratio(1, 4)]));
        assert!(!c.contains(&[ratio(1, 2), ratio(1, 3), Rational::one()]));
    }

    #[test]
    fn duplicate_and_degenerate_constraints() {
        let mut c = cube();
        let o = Rational::one;
        let z = Rational::zero;
        c.halfspaces.push(Halfspace::new([int(2), z(), z()], int(2)));
        assert_eq!(c.volume(), Rational::one());
        c.halfspaces.push(Halfspace::new([o(), z(), z()], z()));
        c.halfspaces.push(Halfspace::new([-o(), z(), z()], z()));
        assert_eq!(c.volume(), Rational::zero());
    }
}
