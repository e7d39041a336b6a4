//! Chaining certified bounds and admissible tuples into `DHL[k, m+1]` and
//! `H_m` claims. The implications themselves are taken as axioms, each gated
//! by a named hypothesis.

mod evidence;
mod report;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use sha2::{Digest, Sha256};

use crate::admissible::{format_tuple, is_admissible, Tuple};
use crate::bounds::{asymptotic_lower, AsymptoticParams, Tau};
use crate::cutoff3d::{verify_cutoff, PiecewiseF};
use crate::error::{Error, Result};
use crate::rational::{ceil_above, floor_below, fmt_rational, int, parse_rational, ratio};
use crate::real::{Real, DD};
use crate::varprob::{BoundCertificate, Variant};
use crate::Rational;

pub use evidence::{load_bound, read_bound_file};
pub use report::{audit_report, emit_report};

/// `theta` used for "EH/GEH with theta sufficiently close to 1".
pub fn full_theta() -> Rational {
    &Rational::one() - Rational::new(BigInt::one(), BigInt::from(1_000_000_000u64))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Eh(Rational),
    Geh(Rational),
    Mpz { varpi: Rational, delta: Rational },
    /// `EH[theta]` for every `theta < 1/2`.
    Bv,
}

impl Hypothesis {
    pub fn eh(theta: Rational) -> Result<Self> {
        Self::check_theta(&theta)?;
        Ok(Hypothesis::Eh(theta))
    }

    pub fn geh(theta: Rational) -> Result<Self> {
        Self::check_theta(&theta)?;
        Ok(Hypothesis::Geh(theta))
    }

    pub fn mpz(varpi: Rational, delta: Rational) -> Result<Self> {
        if varpi.is_negative() || delta.is_negative() {
            return Err(Error::InvalidInput("MPZ parameters must be non-negative".into()));
        }
        Ok(Hypothesis::Mpz { varpi, delta })
    }

    fn check_theta(theta: &Rational) -> Result<()> {
        if !(theta > &Rational::zero() && theta < &Rational::one()) {
            return Err(Error::InvalidInput(format!("theta = {} must lie in (0, 1)", fmt_rational(theta))));
        }
        Ok(())
    }

    /// Level of distribution; `1/2` for `BV`, read as a supremum so that strict
    /// comparisons against it stay valid.
    pub fn theta(&self) -> Option<Rational> {
        match self {
            Hypothesis::Eh(t) | Hypothesis::Geh(t) => Some(t.clone()),
            Hypothesis::Bv => Some(ratio(1, 2)),
            Hypothesis::Mpz { .. } => None,
        }
    }

    /// Parses `EH(p/q)`, `GEH(p/q)`, `MPZ(p/q,r/s)`, `BV`; `EH` and `GEH`
    /// without an argument use [`full_theta`].
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("unknown hypothesis {s:?}"));
        let (name, args) = match s.split_once('(') {
            Some((n, rest)) => (n.trim(), Some(rest.strip_suffix(')').ok_or_else(bad)?)),
            None => (s, None),
        };
        let one_arg = || -> Result<Rational> {
            match args {
                Some(a) => parse_rational(a.trim()),
                None => Ok(full_theta()),
            }
        };
        match name.to_ascii_uppercase().as_str() {
            "BV" if args.is_none() => Ok(Hypothesis::Bv),
            "EH" => Hypothesis::eh(one_arg()?),
            "GEH" => Hypothesis::geh(one_arg()?),
            "MPZ" => {
                let (a, b) = args.and_then(|a| a.split_once(',')).ok_or_else(bad)?;
                Hypothesis::mpz(parse_rational(a.trim())?, parse_rational(b.trim())?)
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Eh(t) => write!(f, "EH({})", fmt_rational(t)),
            Hypothesis::Geh(t) => write!(f, "GEH({})", fmt_rational(t)),
            Hypothesis::Mpz { varpi, delta } => write!(f, "MPZ({},{})", fmt_rational(varpi), fmt_rational(delta)),
            Hypothesis::Bv => write!(f, "BV"),
        }
    }
}

/// The variational quantity a certified bound is about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quantity {
    Mk { k: usize },
    /// `M_k^{[t]}`.
    MkTrunc { k: usize, t: Rational },
    MkEps { k: usize, eps: Rational },
    /// `sum J / I` for a three-dimensional cutoff with the given `eps`.
    CutoffRatio { k: usize, eps: Rational, marginals_vanish: bool },
}

impl Quantity {
    pub fn k(&self) -> usize {
        match self {
            Quantity::Mk { k } | Quantity::MkTrunc { k, .. } | Quantity::MkEps { k, .. } | Quantity::CutoffRatio { k, .. } => *k,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Mk { .. } => "mk",
            Quantity::MkTrunc { .. } => "mktrunc",
            Quantity::MkEps { .. } => "mkeps",
            Quantity::CutoffRatio { .. } => "cutoff",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// Gram or Krylov certificate, re-verified in exact arithmetic.
    Certificate { sha256: String },
    /// Explicit truncated bound recomputed from its parameters.
    Asymptotic { theta: Rational, beta: Rational },
    /// Cutoff recomputed exactly: integrals and marginals.
    Cutoff { sha256: String },
    /// Quoted constant taken as given.
    Published { label: String },
    /// Rebuilt from a report during an audit.
    Audit,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Certificate { sha256 } => write!(f, "certificate sha256:{sha256}"),
            Source::Asymptotic { theta, beta } => {
                write!(f, "asymptotic theta={} beta={}", fmt_rational(theta), fmt_rational(beta))
            }
            Source::Cutoff { sha256 } => write!(f, "cutoff3d sha256:{sha256}"),
            Source::Published { label } => write!(f, "published {label}"),
            Source::Audit => write!(f, "audit"),
        }
    }
}

/// A lower bound `value` for `quantity`. Only obtainable from verified inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedBound {
    quantity: Quantity,
    value: Rational,
    source: Source,
}

impl CertifiedBound {
    pub fn from_certificate(cert: &BoundCertificate) -> Result<Self> {
        if !cert.verified {
            return Err(Error::Unverified);
        }
        let quantity = match &cert.variant {
            Variant::Plain { k } => Quantity::Mk { k: *k },
            Variant::Eps { k, eps } => Quantity::MkEps { k: *k, eps: eps.clone() },
        };
        let sha256 = sha256_hex(cert.to_text().as_bytes());
        Ok(CertifiedBound { quantity, value: cert.c.clone(), source: Source::Certificate { sha256 } })
    }

    /// Recomputes the explicit bound for `c = theta/ln k`, `T = beta/ln k`;
    /// the value is rounded down and `T` up, both at `1e-12`.
    pub fn asymptotic(k: u64, theta: &Rational, beta: &Rational) -> Result<Self> {
        let p = AsymptoticParams::from_theta_beta(k, DD::from_rational(theta), DD::from_rational(beta), Tau::Derived);
        let r = asymptotic_lower(&p, DD::lit(1e-22))?;
        let grid = BigInt::from(10u64.pow(12));
        let value = floor_below(&r.lower_bound.to_rational(), &grid);
        let t = ceil_above(&r.t.to_rational(), &grid);
        Ok(CertifiedBound {
            quantity: Quantity::MkTrunc { k: k as usize, t },
            value,
            source: Source::Asymptotic { theta: theta.clone(), beta: beta.clone() },
        })
    }

    /// Exact `J/I` of a three-dimensional cutoff, with its marginal status.
    pub fn cutoff(f: &PiecewiseF) -> Result<Self> {
        let r = verify_cutoff(f)?;
        let mut text = format!("eps = {}\n", fmt_rational(&f.eps));
        for (p, poly) in &f.pieces {
            text.push_str(&format!("{} = {}\n", p.letter(), poly));
        }
        Ok(CertifiedBound {
            quantity: Quantity::CutoffRatio { k: 3, eps: f.eps.clone(), marginals_vanish: r.marginals_vanish() },
            value: &r.j / &r.i,
            source: Source::Cutoff { sha256: sha256_hex(text.as_bytes()) },
        })
    }

    /// A quoted value, recorded as such in every report that uses it.
    pub fn published(quantity: Quantity, value: Rational, label: impl Into<String>) -> Self {
        CertifiedBound { quantity, value, source: Source::Published { label: label.into() } }
    }

    pub(crate) fn audited(quantity: Quantity, value: Rational) -> Self {
        CertifiedBound { quantity, value, source: Source::Audit }
    }

    pub fn quantity(&self) -> &Quantity {
        &self.quantity
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn source(&self) -> &Source {
        &self.source
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DhlRule {
    Mk,
    Trunc,
    Eps,
    Marginal,
}

impl DhlRule {
    pub fn name(self) -> &'static str {
        match self {
            DhlRule::Mk => "mk",
            DhlRule::Trunc => "trunc",
            DhlRule::Eps => "eps",
            DhlRule::Marginal => "marginal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "mk" => DhlRule::Mk,
            "trunc" => DhlRule::Trunc,
            "eps" => DhlRule::Eps,
            "marginal" => DhlRule::Marginal,
            _ => return Err(Error::InvalidInput(format!("unknown rule {s:?}"))),
        })
    }
}

/// An exact side condition `lhs < rhs` (or `<=`) as checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub name: &'static str,
    pub lhs: Rational,
    pub rhs: Rational,
    pub strict: bool,
}

impl Condition {
    fn check(name: &'static str, lhs: Rational, rhs: Rational, strict: bool) -> Result<Condition> {
        let ok = if strict { lhs < rhs } else { lhs <= rhs };
        let c = Condition { name, lhs, rhs, strict };
        if ok {
            Ok(c)
        } else {
            Err(Error::SideCondition(c.to_string()))
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.strict { "<" } else { "<=" };
        write!(f, "{}: {} {op} {}", self.name, fmt_rational(&self.lhs), fmt_rational(&self.rhs))
    }
}

/// `DHL[k, m+1]`, with the inputs and exact margins that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DhlClaim {
    pub k: usize,
    pub m: usize,
    pub rule: DhlRule,
    pub hypothesis: Hypothesis,
    pub eps: Option<Rational>,
    pub nonstrict: bool,
    pub bound: CertifiedBound,
    /// The bound must exceed this.
    pub threshold: Rational,
    /// `bound - threshold > 0`.
    pub margin: Rational,
    pub conditions: Vec<Condition>,
}

impl DhlClaim {
    pub fn statement(&self) -> String {
        format!("DHL[{},{}]", self.k, self.m + 1)
    }
}

/// `H_m <= bound`, witnessed by an admissible tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HmClaim {
    pub m: usize,
    pub bound: i64,
    pub tuple: Tuple,
    pub tuple_sha256: String,
    pub dhl: DhlClaim,
}

impl HmClaim {
    pub fn statement(&self) -> String {
        format!("H_{} <= {}", self.m, self.bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    Dhl(DhlClaim),
    Hm(HmClaim),
}

impl Claim {
    pub fn statement(&self) -> String {
        match self {
            Claim::Dhl(d) => d.statement(),
            Claim::Hm(h) => h.statement(),
        }
    }

    pub fn dhl(&self) -> &DhlClaim {
        match self {
            Claim::Dhl(d) => d,
            Claim::Hm(h) => &h.dhl,
        }
    }
}

fn check_km(k: usize, m: usize, bound: &CertifiedBound) -> Result<()> {
    if m < 1 || k < m + 1 {
        return Err(Error::InvalidInput(format!("need k >= m+1 >= 2, got k = {k}, m = {m}")));
    }
    if bound.quantity.k() != k {
        return Err(Error::InvalidInput(format!("bound is for k = {}, claim is for k = {k}", bound.quantity.k())));
    }
    Ok(())
}

fn exceed(bound: &CertifiedBound, threshold: &Rational) -> Result<Rational> {
    let margin = &bound.value - threshold;
    if margin <= Rational::zero() {
        return Err(Error::InequalityNotSatisfied(format!(
            "{} - {} = {}",
            fmt_rational(&bound.value),
            fmt_rational(threshold),
            fmt_rational(&margin)
        )));
    }
    Ok(margin)
}

fn theta_of(hyp: &Hypothesis) -> Rational {
    hyp.theta().expect("caller checked the hypothesis kind")
}

/// From `M_k > 2m/theta` under `EH[theta]`.
pub fn dhl_from_mk(k: usize, bound: &CertifiedBound, hyp: &Hypothesis, m: usize) -> Result<DhlClaim> {
    check_km(k, m, bound)?;
    if !matches!(hyp, Hypothesis::Eh(_) | Hypothesis::Bv) {
        return Err(Error::InvalidInput(format!("rule mk needs EH or BV, got {hyp}")));
    }
    if !matches!(bound.quantity, Quantity::Mk { .. } | Quantity::MkTrunc { .. }) {
        return Err(Error::InvalidInput(format!("rule mk needs a bound on M_k, got {}", bound.quantity.name())));
    }
    let threshold = int(2 * m as i64) / theta_of(hyp);
    let margin = exceed(bound, &threshold)?;
    Ok(DhlClaim {
        k,
        m,
        rule: DhlRule::Mk,
        hypothesis: hyp.clone(),
        eps: None,
        nonstrict: false,
        bound: bound.clone(),
        threshold,
        margin,
        conditions: Vec::new(),
    })
}

/// `(varpi, delta)` with `m/(1/4+varpi)` just below `c`, and `delta = t(1/4+varpi)`.
pub fn trunc_parameters(m: usize, c: &Rational, t: &Rational) -> Result<(Rational, Rational)> {
    if c <= &Rational::zero() {
        return Err(Error::InvalidInput("bound must be positive".into()));
    }
    let quarter = ratio(1, 4);
    let varpi = ceil_above(&(int(m as i64) / c - &quarter), &BigInt::from(10u64.pow(15)));
    let delta = t * (&quarter + &varpi);
    Ok((varpi, delta))
}

/// From `M_k^{[delta/(1/4+varpi)]} > m/(1/4+varpi)` under `MPZ[varpi, delta]`.
pub fn dhl_from_trunc(k: usize, bound: &CertifiedBound, varpi: &Rational, delta: &Rational, m: usize) -> Result<DhlClaim> {
    check_km(k, m, bound)?;
    let zero = Rational::zero();
    let quarter = ratio(1, 4);
    if !(varpi > &zero && varpi < &quarter) {
        return Err(Error::GateViolated(format!("0 < varpi < 1/4 fails for varpi = {}", fmt_rational(varpi))));
    }
    if !(delta > &zero && delta < &ratio(1, 2)) {
        return Err(Error::GateViolated(format!("0 < delta < 1/2 fails for delta = {}", fmt_rational(delta))));
    }
    let gate = int(600) * varpi + int(180) * delta;
    if gate >= int(7) {
        return Err(Error::GateViolated(format!("600 varpi + 180 delta = {} is not < 7", fmt_rational(&gate))));
    }
    let level = &quarter + varpi;
    let Quantity::MkTrunc { t, .. } = &bound.quantity else {
        return Err(Error::InvalidInput(format!("rule trunc needs a bound on M_k^[T], got {}", bound.quantity.name())));
    };
    let mut conditions = vec![Condition::check("600 varpi + 180 delta < 7", gate, int(7), true)?];
    conditions.push(Condition::check("T <= delta/(1/4+varpi)", t.clone(), delta / &level, false)?);
    let threshold = int(m as i64) / level;
    let margin = exceed(bound, &threshold)?;
    Ok(DhlClaim {
        k,
        m,
        rule: DhlRule::Trunc,
        hypothesis: Hypothesis::Mpz { varpi: varpi.clone(), delta: delta.clone() },
        eps: None,
        nonstrict: false,
        bound: bound.clone(),
        threshold,
        margin,
        conditions,
    })
}

/// From `M_{k,eps} > 2m/theta` with `1+eps < 1/theta` under `EH`, or
/// `eps < 1/(k-1)` under `GEH`. `nonstrict` relaxes the side condition to `<=`.
pub fn dhl_from_eps(
    k: usize,
    eps: &Rational,
    bound: &CertifiedBound,
    hyp: &Hypothesis,
    m: usize,
    nonstrict: bool,
) -> Result<DhlClaim> {
    check_km(k, m, bound)?;
    if eps <= &Rational::zero() {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    match &bound.quantity {
        Quantity::MkEps { eps: e, .. } if e == eps => {}
        q => return Err(Error::InvalidInput(format!("rule eps needs a bound on M_k,eps at this eps, got {}", q.name()))),
    }
    let condition = match hyp {
        Hypothesis::Eh(_) | Hypothesis::Bv => {
            Condition::check("1+eps < 1/theta", int(1) + eps, theta_of(hyp).recip(), !nonstrict)?
        }
        Hypothesis::Geh(_) => Condition::check("eps < 1/(k-1)", eps.clone(), ratio(1, k as i64 - 1), !nonstrict)?,
        Hypothesis::Mpz { .. } => return Err(Error::InvalidInput("rule eps needs EH, BV or GEH".into())),
    };
    let threshold = int(2 * m as i64) / theta_of(hyp);
    let margin = exceed(bound, &threshold)?;
    Ok(DhlClaim {
        k,
        m,
        rule: DhlRule::Eps,
        hypothesis: hyp.clone(),
        eps: Some(eps.clone()),
        nonstrict,
        bound: bound.clone(),
        threshold,
        margin,
        conditions: vec![condition],
    })
}

/// From a cutoff with vanishing marginals and `sum J / I > 2m/theta` under `GEH`.
pub fn dhl_from_marginal(k: usize, eps: &Rational, bound: &CertifiedBound, hyp: &Hypothesis, m: usize) -> Result<DhlClaim> {
    check_km(k, m, bound)?;
    if !matches!(hyp, Hypothesis::Geh(_)) {
        return Err(Error::InvalidInput(format!("rule marginal needs GEH, got {hyp}")));
    }
    let condition = Condition::check("eps < 1/(k-1)", eps.clone(), ratio(1, k as i64 - 1), true)?;
    match &bound.quantity {
        Quantity::CutoffRatio { eps: e, marginals_vanish: true, .. } if e == eps => {}
        _ => return Err(Error::MarginalVerificationMissing),
    }
    let threshold = int(2 * m as i64) / theta_of(hyp);
    let margin = exceed(bound, &threshold)?;
    Ok(DhlClaim {
        k,
        m,
        rule: DhlRule::Marginal,
        hypothesis: hyp.clone(),
        eps: Some(eps.clone()),
        nonstrict: false,
        bound: bound.clone(),
        threshold,
        margin,
        conditions: vec![condition],
    })
}

/// `DHL[k, m+1]` and an admissible `k`-tuple give `H_m <= diameter`.
pub fn hm_from_dhl(d: &DhlClaim, t: &Tuple) -> Result<HmClaim> {
    if t.k() != d.k {
        return Err(Error::SizeMismatch { expected: d.k, found: t.k() });
    }
    if !is_admissible(t) {
        return Err(Error::NotAdmissible);
    }
    Ok(HmClaim {
        m: d.m,
        bound: t.diameter(),
        tuple: t.clone(),
        tuple_sha256: sha256_hex(format_tuple(t).as_bytes()),
        dhl: d.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypothesis_round_trip() {
        for s in ["EH(1/2)", "GEH(999999999/1000000000)", "MPZ(1/200,1/50)", "BV"] {
            assert_eq!(Hypothesis::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Hypothesis::parse("GEH").unwrap(), Hypothesis::Geh(full_theta()));
        assert!(Hypothesis::parse("EH(1)").is_err());
        assert!(Hypothesis::parse("EH(0)").is_err());
        assert!(Hypothesis::parse("MPZ(-1/2,0)").is_err());
        assert!(Hypothesis::parse("BV(1/3)").is_err());
        assert!(Hypothesis::parse("XY").is_err());
    }

    #[test]
    fn condition_display() {
        let c = Condition::check("eps < 1/(k-1)", ratio(1, 50), ratio(1, 50), false).unwrap();
        assert_eq!(c.to_string(), "eps < 1/(k-1): 1/50 <= 1/50");
        assert!(Condition::check("x", ratio(1, 50), ratio(1, 50), true).is_err());
    }
}
