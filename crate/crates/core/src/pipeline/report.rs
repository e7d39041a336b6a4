//! Line-oriented claim reports and their audit.

use std::fmt::Write as _;

use super::{
    dhl_from_eps, dhl_from_marginal, dhl_from_mk, dhl_from_trunc, CertifiedBound, Claim, DhlClaim, DhlRule, Hypothesis,
    Quantity,
};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, parse_rational};
use crate::Rational;

const HEADER: &str = "# primegaps claim report";

fn write_dhl(s: &mut String, d: &DhlClaim) {
    writeln!(s, "dhl = {}", d.statement()).unwrap();
    writeln!(s, "rule = {}", d.rule.name()).unwrap();
    writeln!(s, "k = {}", d.k).unwrap();
    writeln!(s, "m = {}", d.m).unwrap();
    writeln!(s, "hypothesis = {}", d.hypothesis).unwrap();
    if let Some(e) = &d.eps {
        writeln!(s, "eps = {}", fmt_rational(e)).unwrap();
    }
    writeln!(s, "nonstrict = {}", d.nonstrict).unwrap();
    let q = d.bound.quantity();
    writeln!(s, "quantity = {}", q.name()).unwrap();
    writeln!(s, "quantity.k = {}", q.k()).unwrap();
    match q {
        Quantity::Mk { .. } => {}
        Quantity::MkTrunc { t, .. } => writeln!(s, "quantity.t = {}", fmt_rational(t)).unwrap(),
        Quantity::MkEps { eps, .. } => writeln!(s, "quantity.eps = {}", fmt_rational(eps)).unwrap(),
        Quantity::CutoffRatio { eps, marginals_vanish, .. } => {
            writeln!(s, "quantity.eps = {}", fmt_rational(eps)).unwrap();
            writeln!(s, "quantity.marginals = {}", if *marginals_vanish { "vanish" } else { "nonzero" }).unwrap();
        }
    }
    writeln!(s, "value = {}", fmt_rational(d.bound.value())).unwrap();
    writeln!(s, "source = {}", d.bound.source()).unwrap();
    writeln!(s, "threshold = {}", fmt_rational(&d.threshold)).unwrap();
    writeln!(s, "margin = {}", fmt_rational(&d.margin)).unwrap();
    for c in &d.conditions {
        writeln!(s, "condition = {c}").unwrap();
    }
}

/// Deterministic report: a header, then one block per claim in input order.
pub fn emit_report(claims: &[Claim]) -> String {
    let mut s = String::new();
    writeln!(s, "{HEADER}").unwrap();
    writeln!(s, "version = 1").unwrap();
    writeln!(s, "claims = {}", claims.len()).unwrap();
    for (i, c) in claims.iter().enumerate() {
        writeln!(s).unwrap();
        writeln!(s, "[claim {}]", i + 1).unwrap();
        writeln!(s, "statement = {}", c.statement()).unwrap();
        if let Claim::Hm(h) = c {
            writeln!(s, "bound = {}", h.bound).unwrap();
            writeln!(s, "tuple.k = {}", h.tuple.k()).unwrap();
            writeln!(s, "tuple.diameter = {}", h.tuple.diameter()).unwrap();
            writeln!(s, "tuple.sha256 = {}", h.tuple_sha256).unwrap();
        }
        write_dhl(&mut s, c.dhl());
    }
    s
}

struct Block {
    index: usize,
    fields: Vec<(usize, String, String)>,
}

impl Block {
    fn get(&self, key: &str) -> Result<&str> {
        self.fields
            .iter()
            .find(|f| f.1 == key)
            .map(|f| f.2.as_str())
            .ok_or_else(|| self.fail(format!("missing `{key}`")))
    }

    fn all(&self, key: &str) -> Vec<&str> {
        self.fields.iter().filter(|f| f.1 == key).map(|f| f.2.as_str()).collect()
    }

    fn rat(&self, key: &str) -> Result<Rational> {
        parse_rational(self.get(key)?).map_err(|e| self.fail(format!("`{key}`: {e}")))
    }

    fn int<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.parse().map_err(|_| self.fail(format!("bad integer for `{key}`")))
    }

    fn fail(&self, msg: String) -> Error {
        Error::Verification(format!("claim {}: {msg}", self.index))
    }
}

fn blocks(text: &str) -> Result<(usize, Vec<Block>)> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == HEADER => {}
        _ => return Err(Error::Parse { line: 1, msg: "missing report header".into() }),
    }
    let mut declared = None;
    let mut out: Vec<Block> = Vec::new();
    for (i, line) in lines {
        let l = line.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix("[claim ").and_then(|r| r.strip_suffix(']')) {
            let index: usize = rest.parse().map_err(|_| Error::Parse { line: i + 1, msg: "bad claim index".into() })?;
            if index != out.len() + 1 {
                return Err(Error::Parse { line: i + 1, msg: "claims out of order".into() });
            }
            out.push(Block { index, fields: Vec::new() });
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| Error::Parse { line: i + 1, msg: "expected `key = value`".into() })?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        match out.last_mut() {
            Some(b) => b.fields.push((i + 1, k, v)),
            None if k == "claims" => {
                declared = Some(v.parse().map_err(|_| Error::Parse { line: i + 1, msg: "bad claim count".into() })?)
            }
            None if k == "version" && v == "1" => {}
            None => return Err(Error::Parse { line: i + 1, msg: format!("unexpected header field `{k}`") }),
        }
    }
    let declared = declared.ok_or_else(|| Error::Parse { line: 0, msg: "missing claim count".into() })?;
    Ok((declared, out))
}

fn rebuild(b: &Block) -> Result<DhlClaim> {
    let k: usize = b.int("k")?;
    let m: usize = b.int("m")?;
    let hyp = Hypothesis::parse(b.get("hypothesis")?)?;
    let qk: usize = b.int("quantity.k")?;
    let quantity = match b.get("quantity")? {
        "mk" => Quantity::Mk { k: qk },
        "mktrunc" => Quantity::MkTrunc { k: qk, t: b.rat("quantity.t")? },
        "mkeps" => Quantity::MkEps { k: qk, eps: b.rat("quantity.eps")? },
        "cutoff" => Quantity::CutoffRatio {
            k: qk,
            eps: b.rat("quantity.eps")?,
            marginals_vanish: b.get("quantity.marginals")? == "vanish",
        },
        other => return Err(b.fail(format!("unknown quantity {other:?}"))),
    };
    let bound = CertifiedBound::audited(quantity, b.rat("value")?);
    let nonstrict = match b.get("nonstrict")? {
        "true" => true,
        "false" => false,
        other => return Err(b.fail(format!("bad flag {other:?}"))),
    };
    match DhlRule::parse(b.get("rule")?)? {
        DhlRule::Mk => dhl_from_mk(k, &bound, &hyp, m),
        DhlRule::Trunc => match &hyp {
            Hypothesis::Mpz { varpi, delta } => dhl_from_trunc(k, &bound, varpi, delta, m),
            _ => Err(b.fail("rule trunc needs an MPZ hypothesis".into())),
        },
        DhlRule::Eps => dhl_from_eps(k, &b.rat("eps")?, &bound, &hyp, m, nonstrict),
        DhlRule::Marginal => dhl_from_marginal(k, &b.rat("eps")?, &bound, &hyp, m),
    }
}

fn audit_block(b: &Block) -> Result<String> {
    let d = rebuild(b).map_err(|e| b.fail(e.to_string()))?;
    let check = |key: &str, want: String| -> Result<()> {
        let got = b.get(key)?;
        if got != want {
            return Err(b.fail(format!("`{key}` is {got:?}, recomputed {want:?}")));
        }
        Ok(())
    };
    check("dhl", d.statement())?;
    check("threshold", fmt_rational(&d.threshold))?;
    check("margin", fmt_rational(&d.margin))?;
    let conditions: Vec<String> = d.conditions.iter().map(|c| c.to_string()).collect();
    if b.all("condition") != conditions {
        return Err(b.fail("side conditions differ from the recomputed ones".into()));
    }
    let statement = b.get("statement")?;
    if statement.starts_with("H_") {
        let bound: i64 = b.int("bound")?;
        let tk: usize = b.int("tuple.k")?;
        let diameter: i64 = b.int("tuple.diameter")?;
        if tk != d.k || diameter != bound {
            return Err(b.fail("tuple does not match the claim".into()));
        }
        check("statement", format!("H_{} <= {bound}", d.m))?;
    } else {
        check("statement", d.statement())?;
    }
    Ok(statement.to_string())
}

/// Re-parses a report and re-validates every inequality exactly; returns the
/// audited statements.
pub fn audit_report(text: &str) -> Result<Vec<String>> {
    let (declared, bs) = blocks(text)?;
    if declared != bs.len() {
        return Err(Error::Verification(format!("report declares {declared} claims, holds {}", bs.len())));
    }
    bs.iter().map(audit_block).collect()
}
