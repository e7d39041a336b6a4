//! Exact verification of a three-dimensional piecewise polynomial cutoff
//! supported on `R = {x, y, z >= 0, x + y + z <= 3/2}`.
//!
//! `R` is split into six chambers by the order of the coordinates, and the
//! chamber `y < x < z` into ten polytopes `A B C D E S T U G H`. The other
//! chambers carry relabelled copies: the copy `P_yzx` is the set of points
//! `(x, y, z)` with `(y, z, x)` in `P_xyz`, and there `F = F_P(y, z, x)`.

mod geometry;
mod poly;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

pub use geometry::{Halfspace, Polytope3};
pub use poly::{Exp, Poly3};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, ratio};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Piece {
    A,
    B,
    C,
    D,
    E,
    S,
    T,
    U,
    G,
    H,
}

impl Piece {
    pub const ALL: [Piece; 10] =
        [Piece::A, Piece::B, Piece::C, Piece::D, Piece::E, Piece::S, Piece::T, Piece::U, Piece::G, Piece::H];

    pub fn letter(self) -> char {
        match self {
            Piece::A => 'A',
            Piece::B => 'B',
            Piece::C => 'C',
            Piece::D => 'D',
            Piece::E => 'E',
            Piece::S => 'S',
            Piece::T => 'T',
            Piece::U => 'U',
            Piece::G => 'G',
            Piece::H => 'H',
        }
    }

    pub fn from_letter(c: char) -> Option<Piece> {
        Piece::ALL.into_iter().find(|p| p.letter() == c)
    }
}

/// Coordinate relabelling; `Perm([1, 2, 0])` is `yzx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(pub [usize; 3]);

impl Perm {
    pub const ID: Perm = Perm([0, 1, 2]);
    pub const ALL: [Perm; 6] =
        [Perm([0, 1, 2]), Perm([0, 2, 1]), Perm([1, 0, 2]), Perm([1, 2, 0]), Perm([2, 0, 1]), Perm([2, 1, 0])];

    pub fn parse(s: &str) -> Option<Perm> {
        let idx: Vec<usize> = s.chars().map(|c| "xyz".find(c)).collect::<Option<_>>()?;
        let p: [usize; 3] = idx.try_into().ok()?;
        Perm::ALL.contains(&Perm(p)).then_some(Perm(p))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &i in &self.0 {
            write!(f, "{}", ['x', 'y', 'z'][i])?;
        }
        Ok(())
    }
}

/// A piece together with a relabelling, written like `A_yzx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub piece: Piece,
    pub perm: Perm,
}

impl Label {
    pub fn parse(s: &str) -> Result<Label> {
        let bad = || Error::InvalidInput(format!("bad polytope name {s:?}"));
        let (p, q) = s.split_once('_').ok_or_else(bad)?;
        let mut cs = p.chars();
        let piece = cs.next().and_then(Piece::from_letter).ok_or_else(bad)?;
        if cs.next().is_some() {
            return Err(bad());
        }
        Ok(Label { piece, perm: Perm::parse(q).ok_or_else(bad)? })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.piece.letter(), self.perm)
    }
}

/// Symmetric piecewise polynomial given by its pieces on the `xyz` chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseF {
    pub eps: Rational,
    pub pieces: BTreeMap<Piece, Poly3>,
}

const PAPER_PIECES: [(Piece, &str); 9] = [
    (
        Piece::A,
        "-66+96x-147x^2+125x^3+128y-122xy+104x^2y-275y^2+394y^3+99z-58xz+63x^2z-98yz+51xyz+41y^2z-112z^2+24xz^2+72yz^2+50z^3",
    ),
    (
        Piece::B,
        "-41+52x-73x^2+25x^3+108y-66xy+71x^2y-294y^2+56xy^2+363y^3+33z+15xz+22x^2z-40yz-42xyz+75y^2z-36z^2-24xz^2+26yz^2+20z^3",
    ),
    (Piece::C, "-22+45x-35x^2+63y-99xy+82x^2y-140y^2+54xy^2+179y^3"),
    (Piece::E, "-12+8x+32y"),
    (Piece::S, "-6+8x+16y"),
    (Piece::T, "18-30x+12x^2+42y-20xy-66y^2-45z+34xz+22z^2"),
    (Piece::U, "94-1823x+5760x^2-5128x^3+54y-168x^2y+105y^2+1422xz-2340x^2z-192y^2z-128z^2-268xz^2+64z^3"),
    (
        Piece::G,
        "5274-19833x+18570x^2-5128x^3-18024y+44696xy-20664x^2y+16158y^2-19056xy^2-4592y^3-10704z+26860xz-12588x^2z+24448yz-30352xyz-10980y^2z+7240z^2-9092xz^2-8288yz^2-1632z^3",
    ),
    (Piece::H, "8z"),
];

impl PiecewiseF {
    pub fn zero(eps: Rational) -> Self {
        PiecewiseF { eps, pieces: BTreeMap::new() }
    }

    /// The same constant on every piece.
    pub fn constant(eps: Rational, c: Rational) -> Self {
        let pieces = Piece::ALL.iter().map(|&p| (p, Poly3::constant(c.clone()))).collect();
        PiecewiseF { eps, pieces }
    }

    /// The published cutoff, with `eps = 1/4` and zero on `D`.
    pub fn paper() -> Self {
        let eps = ratio(1, 4);
        let pieces = PAPER_PIECES.iter().map(|(p, s)| (*p, Poly3::parse(s, &eps).expect("built-in piece"))).collect();
        PiecewiseF { eps, pieces }
    }

    pub fn piece(&self, p: Piece) -> Poly3 {
        self.pieces.get(&p).cloned().unwrap_or_default()
    }

    pub fn with_piece(mut self, p: Piece, f: Poly3) -> Self {
        self.pieces.insert(p, f);
        self
    }

    /// `F` on the relabelled copy named by `label`, as a polynomial in `(x, y, z)`.
    pub fn on(&self, label: Label) -> Poly3 {
        self.piece(label.piece).permute(label.perm.0)
    }

    /// Value at a point; zero outside `R` and on piece boundaries.
    pub fn eval(&self, v: &[Rational; 3]) -> Rational {
        match classify(v, &self.eps) {
            Some(label) => self.on(label).eval(v),
            None => Rational::zero(),
        }
    }

    pub fn eval_f64(&self, v: [f64; 3]) -> f64 {
        match classify_f64(v, crate::rational::to_f64(&self.eps)) {
            Some(label) => self.on(label).eval_f64(v),
            None => 0.0,
        }
    }
}

fn check_eps(eps: &Rational) -> Result<()> {
    if *eps < ratio(1, 4) || *eps > ratio(1, 3) {
        return Err(Error::InvalidInput(format!("eps = {} outside [1/4, 1/3]", fmt_rational(eps))));
    }
    Ok(())
}

fn hs(a: [i64; 3], b: Rational) -> Halfspace {
    Halfspace::new([int(a[0]), int(a[1]), int(a[2])], b)
}

/// Half-spaces of the piece in the `xyz` chamber (`y < x < z`).
pub fn canonical_halfspaces(piece: Piece, eps: &Rational) -> Vec<Halfspace> {
    let one = Rational::one();
    let lo = &one - eps;
    let hi = &one + eps;
    let half = ratio(1, 2);
    let mut v = vec![
        hs([-1, 0, 0], Rational::zero()),
        hs([0, -1, 0], Rational::zero()),
        hs([0, 0, -1], Rational::zero()),
        hs([1, 1, 1], ratio(3, 2)),
        hs([-1, 1, 0], Rational::zero()),
        hs([1, 0, -1], Rational::zero()),
    ];
    // pair sums s1 = x + y < s2 = y + z < s3 = z + x
    let below = |s: [i64; 3], b: &Rational| hs(s, b.clone());
    let above = |s: [i64; 3], b: &Rational| hs([-s[0], -s[1], -s[2]], -b);
    let (s1, s2, s3) = ([1, 1, 0], [0, 1, 1], [1, 0, 1]);
    let f_region = |v: &mut Vec<Halfspace>| {
        v.push(below(s1, &lo));
        v.push(above(s2, &lo));
        v.push(below(s2, &hi));
        v.push(above(s3, &hi));
    };
    match piece {
        Piece::A => v.push(below(s3, &lo)),
        Piece::B => {
            v.push(below(s2, &lo));
            v.push(above(s3, &lo));
            v.push(below(s3, &hi));
        }
        Piece::C => {
            v.push(below(s1, &lo));
            v.push(above(s2, &lo));
            v.push(below(s3, &hi));
        }
        Piece::D => {
            v.push(above(s1, &lo));
            v.push(below(s3, &hi));
        }
        Piece::E => {
            v.push(below(s2, &lo));
            v.push(above(s3, &hi));
        }
        Piece::S => {
            f_region(&mut v);
            v.push(hs([0, 0, 1], &half + eps));
        }
        Piece::T => {
            f_region(&mut v);
            v.push(hs([0, 0, -1], -(&half + eps)));
            v.push(hs([-1, 0, 0], -(&half - eps)));
        }
        Piece::U => {
            f_region(&mut v);
            v.push(hs([1, 0, 0], &half - eps));
        }
        Piece::G => {
            v.push(below(s1, &lo));
            v.push(above(s2, &hi));
        }
        Piece::H => {
            v.push(above(s1, &lo));
            v.push(below(s2, &hi));
            v.push(above(s3, &hi));
        }
    }
    v
}

pub fn polytope(label: Label, eps: &Rational) -> Polytope3 {
    let hs = canonical_halfspaces(label.piece, eps).iter().map(|h| h.permute(label.perm.0)).collect();
    Polytope3::new(label.to_string(), hs)
}

/// All 60 polytopes of the partition of `R`.
pub fn build_partition(eps: &Rational) -> Result<Vec<Polytope3>> {
    check_eps(eps)?;
    let mut out = Vec::with_capacity(60);
    for perm in Perm::ALL {
        for piece in Piece::ALL {
            out.push(polytope(Label { piece, perm }, eps));
        }
    }
    Ok(out)
}

/// Relabelling that sends the point into the `xyz` chamber: `(v[s0], v[s1], v[s2])`
/// is (middle, smallest, largest). `None` on ties.
fn chamber<T: PartialOrd + Copy>(v: [T; 3]) -> Option<[usize; 3]> {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(std::cmp::Ordering::Equal));
    if !(v[idx[0]] < v[idx[1]] && v[idx[1]] < v[idx[2]]) {
        return None;
    }
    Some([idx[1], idx[0], idx[2]])
}

/// Piece of a chamber point from its pair sums `s1 < s2 < s3`; `cut` holds
/// `1 - eps, 1 + eps, 1/2 - eps, 1/2 + eps`.
fn piece_of<T: PartialOrd + Copy>([s1, s2, s3]: [T; 3], x: T, z: T, [lo, hi, half_lo, half_hi]: [T; 4]) -> Option<Piece> {
    use Piece::*;
    let p = if s3 < lo {
        A
    } else if s2 < lo {
        if s3 < hi {
            B
        } else {
            E
        }
    } else if s1 > lo {
        if s3 < hi {
            D
        } else if s2 < hi {
            H
        } else {
            return None;
        }
    } else if s3 < hi {
        C
    } else if s2 > hi {
        G
    } else if z < half_hi {
        S
    } else if x > half_lo {
        T
    } else {
        U
    };
    Some(p)
}

/// Label of the open polytope containing `v`, if any.
pub fn classify(v: &[Rational; 3], eps: &Rational) -> Option<Label> {
    if v.iter().any(|c| *c <= Rational::zero()) || &v[0] + &v[1] + &v[2] >= ratio(3, 2) {
        return None;
    }
    let refs = [&v[0], &v[1], &v[2]];
    let s = chamber(refs)?;
    let (x, y, z) = (v[s[0]].clone(), v[s[1]].clone(), v[s[2]].clone());
    let one = Rational::one();
    let half = ratio(1, 2);
    let (s1, s2, s3) = (&x + &y, &y + &z, &z + &x);
    let (lo, hi, hl, hh) = (&one - eps, &one + eps, &half - eps, &half + eps);
    let boundary = [&s1, &s2, &s3].iter().any(|s| **s == lo || **s == hi) || z == hh || x == hl;
    if boundary {
        return None;
    }
    piece_of([&s1, &s2, &s3], &x, &z, [&lo, &hi, &hl, &hh]).map(|piece| Label { piece, perm: Perm(s) })
}

pub fn classify_f64(v: [f64; 3], eps: f64) -> Option<Label> {
    if v.iter().any(|&c| c <= 0.0) || v[0] + v[1] + v[2] >= 1.5 {
        return None;
    }
    let s = chamber(v)?;
    let (x, y, z) = (v[s[0]], v[s[1]], v[s[2]]);
    piece_of([x + y, y + z, z + x], x, z, [1.0 - eps, 1.0 + eps, 0.5 - eps, 0.5 + eps])
        .map(|piece| Label { piece, perm: Perm(s) })
}

/// Iterated integral with affine limits: outer variable first.
struct Cell {
    order: [(usize, Poly3, Poly3); 3],
}

fn var_index(c: &str) -> usize {
    match c {
        "x" => 0,
        "y" => 1,
        _ => 2,
    }
}

fn lim(s: &str, eps: &Rational) -> Poly3 {
    Poly3::parse(s, eps).expect("built-in limit")
}

type CellText = [(&'static str, &'static str, &'static str); 3];

const I_CELLS: [(Piece, &[CellText]); 10] = [
    (Piece::A, &[[("x", "0", "1/2-e/2"), ("y", "0", "x"), ("z", "x", "1-e-x")]]),
    (
        Piece::B,
        &[
            [("z", "1/2-e/2", "1/2+e/2"), ("x", "1-e-z", "z"), ("y", "0", "1-e-z")],
            [("z", "1/2+e/2", "1-e"), ("x", "1-e-z", "1+e-z"), ("y", "0", "1-e-z")],
        ],
    ),
    (
        Piece::C,
        &[
            [("y", "0", "1/2-3e/2"), ("x", "y", "y+2e"), ("z", "1-e-y", "1+e-x")],
            [("y", "1/2-3e/2", "1/2-e"), ("x", "y", "1-e-y"), ("z", "1-e-y", "1+e-x")],
            [("y", "1/2-e", "1/2-e/2"), ("x", "y", "1-e-y"), ("z", "1-e-y", "3/2-x-y")],
        ],
    ),
    (
        Piece::D,
        &[
            [("x", "1/2-e/2", "1/2"), ("y", "1-e-x", "x"), ("z", "x", "3/2-x-y")],
            [("x", "1/2", "1/2+e/2"), ("y", "1-e-x", "1/2-e"), ("z", "x", "1+e-x")],
            [("x", "1/2", "1/2+e/2"), ("y", "1/2-e", "3/2-2x"), ("z", "x", "3/2-x-y")],
        ],
    ),
    (Piece::E, &[[("z", "1/2+e/2", "1-e"), ("x", "1+e-z", "z"), ("y", "0", "1-e-z")]]),
    (
        Piece::S,
        &[
            [("y", "0", "1/2-3e/2"), ("z", "1-e-y", "1/2+e"), ("x", "1+e-z", "1-e-y")],
            [("y", "1/2-3e/2", "1/2-e"), ("z", "y+2e", "1/2+e"), ("x", "1+e-z", "1-e-y")],
        ],
    ),
    (
        Piece::T,
        &[
            [("z", "1/2+e", "1/2+2e"), ("x", "1+e-z", "3/2-z"), ("y", "0", "3/2-x-z")],
            [("z", "1/2+2e", "1+e"), ("x", "1/2-e", "3/2-z"), ("y", "0", "3/2-x-z")],
        ],
    ),
    (Piece::U, &[[("x", "0", "1/2-e"), ("y", "0", "x"), ("z", "1+e-x", "1+e-y")]]),
    (Piece::G, &[[("x", "0", "1/2-e"), ("y", "0", "x"), ("z", "1+e-y", "3/2-x-y")]]),
    (
        Piece::H,
        &[
            [("x", "1/2+e/2", "1-e"), ("y", "1-e-x", "3/2-2x"), ("z", "x", "3/2-x-y")],
            [("x", "1-e", "3/4"), ("y", "0", "3/2-2x"), ("z", "x", "3/2-x-y")],
            [("x", "1/2", "1/2+e/2"), ("y", "1-e-x", "1/2-e"), ("z", "1+e-x", "3/2-x-y")],
        ],
    ),
];

fn cells(piece: Piece, eps: &Rational) -> Vec<Cell> {
    let (_, text) = I_CELLS.iter().find(|(p, _)| *p == piece).expect("every piece has cells");
    text.iter()
        .map(|c| Cell { order: c.clone().map(|(v, a, b)| (var_index(v), lim(a, eps), lim(b, eps))) })
        .collect()
}

fn integrate_cell(f: &Poly3, cell: &Cell) -> Rational {
    let mut g = f.clone();
    for (v, a, b) in cell.order.iter().rev() {
        g = g.integrate(*v, a, b);
    }
    g.constant_value().expect("fully integrated")
}

fn require_quarter(eps: &Rational) -> Result<()> {
    if *eps != ratio(1, 4) {
        return Err(Error::InvalidInput("the iterated-integral limits are those of eps = 1/4".into()));
    }
    Ok(())
}

/// `int_{P_xyz} g` over the piece from its iterated-integral description.
pub fn integrate_piece(piece: Piece, g: &Poly3, eps: &Rational) -> Result<Rational> {
    require_quarter(eps)?;
    Ok(cells(piece, eps).iter().map(|c| integrate_cell(g, c)).sum())
}

/// `I(F) = int_R F^2 = 6 sum_P int_{P_xyz} F_P^2`.
pub fn integrate_i(f: &PiecewiseF) -> Result<Rational> {
    require_quarter(&f.eps)?;
    let mut total = Rational::zero();
    for piece in Piece::ALL {
        let p = f.piece(piece);
        if p.is_zero() {
            continue;
        }
        total += integrate_piece(piece, &p.mul(&p), &f.eps)?;
    }
    Ok(total * int(6))
}

/// `I(F)` through vertex enumeration and tetrahedra; valid for any `eps` in range.
pub fn integrate_i_polytopes(f: &PiecewiseF) -> Result<Rational> {
    check_eps(&f.eps)?;
    let mut total = Rational::zero();
    for piece in Piece::ALL {
        let p = f.piece(piece);
        if !p.is_zero() {
            total += polytope(Label { piece, perm: Perm::ID }, &f.eps).integrate(&p.mul(&p));
        }
    }
    Ok(total * int(6))
}

type Segment = (&'static str, &'static str, &'static str);

/// `(x range, y range)` cells and the `z` segments of `int_0^{3/2-x-y} F dz`.
const J_REGIONS: [(&[(&str, &str, &str, &str)], &[Segment]); 8] = [
    (
        &[("0", "1/2-e", "0", "x")],
        &[
            ("A_yzx", "0", "y"),
            ("A_zyx", "y", "x"),
            ("A_xyz", "x", "1-e-x"),
            ("B_xyz", "1-e-x", "1-e-y"),
            ("C_xyz", "1-e-y", "1+e-x"),
            ("U_xyz", "1+e-x", "1+e-y"),
            ("G_xyz", "1+e-y", "3/2-x-y"),
        ],
    ),
    (
        &[("1/2-e", "1/2-e/2", "1/2-e", "x")],
        &[
            ("A_yzx", "0", "y"),
            ("A_zyx", "y", "x"),
            ("A_xyz", "x", "1-e-x"),
            ("B_xyz", "1-e-x", "1-e-y"),
            ("C_xyz", "1-e-y", "3/2-x-y"),
        ],
    ),
    (
        &[("1/2-e", "1/2-e/2", "0", "1/2-e")],
        &[
            ("A_yzx", "0", "y"),
            ("A_zyx", "y", "x"),
            ("A_xyz", "x", "1-e-x"),
            ("B_xyz", "1-e-x", "1-e-y"),
            ("C_xyz", "1-e-y", "1+e-x"),
            ("T_xyz", "1+e-x", "3/2-x-y"),
        ],
    ),
    (
        &[("1/2-e/2", "1/2", "1/2-e", "1-e-x")],
        &[
            ("A_yzx", "0", "y"),
            ("A_zyx", "y", "1-e-x"),
            ("B_zyx", "1-e-x", "x"),
            ("B_xyz", "x", "1-e-y"),
            ("C_xyz", "1-e-y", "3/2-x-y"),
        ],
    ),
    (
        &[("1/2-e/2", "1/2", "0", "1/2-e")],
        &[
            ("A_yzx", "0", "y"),
            ("A_zyx", "y", "1-e-x"),
            ("B_zyx", "1-e-x", "x"),
            ("B_xyz", "x", "1-e-y"),
            ("C_xyz", "1-e-y", "1+e-x"),
            ("T_xyz", "1+e-x", "3/2-x-y"),
        ],
    ),
    (
        &[("1/2", "2e", "0", "1-e-x"), ("2e", "1/2+e/2", "x-2e", "1-e-x")],
        &[
            ("A_yzx", "0", "y"),
            ("A_zyx", "y", "1-e-x"),
            ("B_zyx", "1-e-x", "x"),
            ("B_xyz", "x", "1-e-y"),
            ("C_xyz", "1-e-y", "1+e-x"),
            ("S_xyz", "1+e-x", "1/2+e"),
            ("T_xyz", "1/2+e", "3/2-x-y"),
        ],
    ),
    (
        &[("2e", "1/2+e/2", "0", "x-2e")],
        &[
            ("A_yzx", "0", "y"),
            ("A_zyx", "y", "1-e-x"),
            ("B_zyx", "1-e-x", "x"),
            ("B_xyz", "x", "1+e-x"),
            ("E_xyz", "1+e-x", "1-e-y"),
            ("S_xyz", "1-e-y", "1/2+e"),
            ("T_xyz", "1/2+e", "3/2-x-y"),
        ],
    ),
    (
        &[("1/2+e/2", "1-e", "0", "1-e-x")],
        &[
            ("A_yzx", "0", "y"),
            ("A_zyx", "y", "1-e-x"),
            ("B_zyx", "1-e-x", "1+e-x"),
            ("E_zyx", "1+e-x", "x"),
            ("E_xyz", "x", "1-e-y"),
            ("S_xyz", "1-e-y", "1/2+e"),
            ("T_xyz", "1/2+e", "3/2-x-y"),
        ],
    ),
];

/// `sum int_lo^hi F_label dz` as a polynomial in `(x, y)`.
fn z_marginal(f: &PiecewiseF, segments: &[Segment]) -> Poly3 {
    let mut g = Poly3::zero();
    for (name, lo, hi) in segments {
        let label = Label::parse(name).expect("built-in label");
        g = g.add(&f.on(label).integrate(2, &lim(lo, &f.eps), &lim(hi, &f.eps)));
    }
    g
}

/// The eight pieces `J_1, ..., J_8` with `J(F) = 6 (J_1 + ... + J_8)`.
pub fn j_parts(f: &PiecewiseF) -> Result<Vec<Rational>> {
    require_quarter(&f.eps)?;
    let mut out = Vec::with_capacity(8);
    for (cells, segments) in J_REGIONS.iter() {
        let g = z_marginal(f, segments);
        let sq = g.mul(&g);
        let mut part = Rational::zero();
        for (x0, x1, y0, y1) in cells.iter() {
            let inner = sq.integrate(1, &lim(y0, &f.eps), &lim(y1, &f.eps));
            let v = inner.integrate(0, &lim(x0, &f.eps), &lim(x1, &f.eps));
            part += v.constant_value().expect("fully integrated");
        }
        out.push(part);
    }
    Ok(out)
}

/// `J(F) = 3 int_{x+y <= 1-eps} (int_0^inf F dz)^2 dx dy`.
pub fn integrate_j(f: &PiecewiseF) -> Result<Rational> {
    Ok(j_parts(f)?.into_iter().sum::<Rational>() * int(6))
}

const MARGINALS: [(&str, &[Segment]); 6] = [
    ("m1", &[("G_yzx", "0", "3/2-x-y")]),
    ("m2", &[("G_yzx", "0", "y"), ("G_zyx", "y", "3/2-x-y")]),
    ("m3", &[("U_yzx", "0", "1+e-x"), ("G_yzx", "1+e-x", "y"), ("G_zyx", "y", "3/2-x-y")]),
    ("m4", &[("U_yzx", "0", "1+e-x"), ("G_yzx", "1+e-x", "3/2-x-y")]),
    ("m5", &[("T_yzx", "0", "3/2-x-y")]),
    ("m7", &[("E_yzx", "0", "1-e-x"), ("S_yzx", "1-e-x", "1-e-y"), ("H_yzx", "1-e-y", "3/2-x-y")]),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marginal {
    pub id: &'static str,
    pub residual: Poly3,
}

/// The marginal identities as polynomials in `(x, y)`; all zero means
/// `int_0^inf F dz = 0` wherever `x + y > 1 + eps`.
pub fn check_marginals(f: &PiecewiseF) -> Vec<Marginal> {
    MARGINALS.iter().map(|(id, segs)| Marginal { id, residual: z_marginal(f, segs) }).collect()
}

#[derive(Clone, Debug)]
pub struct CutoffReport {
    pub i: Rational,
    pub j: Rational,
    /// `J/I - 2`.
    pub excess: Rational,
    pub marginals: Vec<Marginal>,
}

impl CutoffReport {
    pub fn marginals_vanish(&self) -> bool {
        self.marginals.iter().all(|m| m.residual.is_zero())
    }

    pub fn passed(&self) -> bool {
        self.marginals_vanish() && self.excess > Rational::zero()
    }
}

impl fmt::Display for CutoffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "I = {}", fmt_rational(&self.i))?;
        writeln!(f, "J = {}", fmt_rational(&self.j))?;
        writeln!(f, "J/I - 2 = {}", fmt_rational(&self.excess))?;
        for m in &self.marginals {
            writeln!(f, "{} = {}", m.id, m.residual)?;
        }
        write!(f, "status = {}", if self.passed() { "ok" } else { "FAILED" })
    }
}

/// Marginals, `I`, `J` and the ratio. Marginals are checked at `f.eps`; the
/// integrals need `eps = 1/4`.
pub fn verify_cutoff(f: &PiecewiseF) -> Result<CutoffReport> {
    let marginals = check_marginals(f);
    let i = integrate_i(f)?;
    let j = integrate_j(f)?;
    if i.is_zero() {
        return Err(Error::Verification("I(F) = 0".into()));
    }
    let excess = &j / &i - int(2);
    Ok(CutoffReport { i, j, excess, marginals })
}

pub const PUBLISHED_I: (&str, &str) = ("62082439864241", "507343011840");
pub const PUBLISHED_J: (&str, &str) = ("9933190664926733", "40587440947200");
pub const PUBLISHED_EXCESS: (&str, &str) = ("286648173", "4966595189139280");

fn published(v: (&str, &str)) -> Rational {
    Rational::new(v.0.parse().unwrap(), v.1.parse().unwrap())
}

/// Full check of the built-in cutoff against the published rationals.
pub fn verify_theorem_piece() -> Result<bool> {
    let r = verify_cutoff(&PiecewiseF::paper())?;
    if let Some(m) = r.marginals.iter().find(|m| !m.residual.is_zero()) {
        return Err(Error::Verification(format!("marginal {} = {}", m.id, m.residual)));
    }
    for (name, got, want) in [
        ("I", &r.i, published(PUBLISHED_I)),
        ("J", &r.j, published(PUBLISHED_J)),
        ("J/I - 2", &r.excess, published(PUBLISHED_EXCESS)),
    ] {
        if *got != want {
            return Err(Error::Verification(format!("{name} = {} differs from {}", fmt_rational(got), fmt_rational(&want))));
        }
    }
    Ok(r.excess > Rational::zero())
}
