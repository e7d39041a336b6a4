//! Certificate files: `key = value` lines, then `a[i] = p/q`.

use std::fmt::Write as _;

use super::{assemble, certify, krylov_moments, BoundCertificate, Construction, Variant};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, parse_rational};
use crate::Rational;

impl BoundCertificate {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match &self.variant {
            Variant::Plain { k } => {
                writeln!(s, "variant = plain").unwrap();
                writeln!(s, "k = {k}").unwrap();
            }
            Variant::Eps { k, eps } => {
                writeln!(s, "variant = eps").unwrap();
                writeln!(s, "k = {k}").unwrap();
                writeln!(s, "eps = {}", fmt_rational(eps)).unwrap();
            }
        }
        match &self.construction {
            Construction::Gram { d, full } => {
                writeln!(s, "method = gram").unwrap();
                writeln!(s, "d = {d}").unwrap();
                if *full {
                    writeln!(s, "full = true").unwrap();
                }
            }
            Construction::Krylov { n } => {
                writeln!(s, "method = krylov").unwrap();
                writeln!(s, "n = {n}").unwrap();
            }
            Construction::Custom => writeln!(s, "method = custom").unwrap(),
        }
        writeln!(s, "C = {}", fmt_rational(&self.c)).unwrap();
        for (i, a) in self.a.iter().enumerate() {
            writeln!(s, "a[{i}] = {}", fmt_rational(a)).unwrap();
        }
        s
    }
}

/// Parses a certificate; the result is unverified until re-checked.
pub fn parse_certificate(text: &str) -> Result<BoundCertificate> {
    let mut fields: Vec<(usize, String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (key, value) = l
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected `key = value`".into() })?;
        fields.push((i + 1, key.trim().to_string(), value.trim().to_string()));
    }
    let get = |name: &str| fields.iter().find(|f| f.1 == name).map(|f| (f.0, f.2.as_str()));
    let need = |name: &str| get(name).ok_or_else(|| Error::Parse { line: 0, msg: format!("missing `{name}`") });
    let int = |name: &str| -> Result<u64> {
        let (line, v) = need(name)?;
        v.parse().map_err(|_| Error::Parse { line, msg: format!("bad integer for `{name}`") })
    };
    let rat = |line: usize, v: &str| parse_rational(v).map_err(|e| Error::Parse { line, msg: e.to_string() });
    let k = int("k")? as usize;
    let variant = match need("variant")?.1 {
        "plain" => Variant::Plain { k },
        "eps" => {
            let (line, v) = need("eps")?;
            Variant::Eps { k, eps: rat(line, v)? }
        }
        other => return Err(Error::Parse { line: need("variant")?.0, msg: format!("unknown variant {other:?}") }),
    };
    let construction = match get("method").map(|m| m.1).unwrap_or("gram") {
        "gram" => Construction::Gram {
            d: int("d")? as u32,
            full: get("full").map(|f| f.1 == "true").unwrap_or(false),
        },
        "krylov" => Construction::Krylov { n: int("n")? as usize },
        "custom" => Construction::Custom,
        other => return Err(Error::Parse { line: 0, msg: format!("unknown method {other:?}") }),
    };
    let (cl, cv) = need("C")?;
    let c = rat(cl, cv)?;
    let mut a: Vec<(usize, Rational)> = Vec::new();
    for (line, key, value) in &fields {
        if let Some(idx) = key.strip_prefix("a[").and_then(|r| r.strip_suffix(']')) {
            let i: usize = idx.parse().map_err(|_| Error::Parse { line: *line, msg: "bad index".into() })?;
            a.push((i, rat(*line, value)?));
        }
    }
    a.sort_by_key(|x| x.0);
    if a.iter().enumerate().any(|(pos, (i, _))| pos != *i) {
        return Err(Error::Parse { line: 0, msg: "coefficient indices must be 0..n-1".into() });
    }
    Ok(BoundCertificate { variant, construction, a: a.into_iter().map(|x| x.1).collect(), c, verified: false })
}

/// Rebuilds the matrices named by the certificate and re-checks it exactly.
pub fn verify_certificate(cert: &BoundCertificate) -> Result<BoundCertificate> {
    let g = match &cert.construction {
        Construction::Gram { d, full } => assemble(cert.variant.clone(), *d, *full)?,
        Construction::Krylov { n } => {
            if !matches!(cert.variant, Variant::Plain { .. }) {
                return Err(Error::InvalidInput("Krylov certificates are for the plain variant".into()));
            }
            krylov_moments(cert.variant.k(), 2 * n)?.hankel(*n)?
        }
        Construction::Custom => return Err(Error::InvalidInput("custom certificates cannot be rebuilt".into())),
    };
    if g.dim() != cert.a.len() {
        return Err(Error::SizeMismatch { expected: g.dim(), found: cert.a.len() });
    }
    Ok(certify(&g, &cert.a, &cert.c))
}
