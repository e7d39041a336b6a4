//! Bound files. A file either holds a Gram/Krylov certificate, or starts a
//! `method = asymptotic | cutoff3d | published` block of `key = value` lines.

use std::path::Path;

use super::{CertifiedBound, Quantity};
use crate::cutoff3d::{Piece, PiecewiseF, Poly3};
use crate::error::{Error, Result};
use crate::rational::parse_rational;
use crate::varprob::{parse_certificate, verify_certificate};
use crate::Rational;

fn fields(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (key, value) = l
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected `key = value`".into() })?;
        out.push((i + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Parses a bound file and re-verifies whatever it names.
pub fn load_bound(text: &str) -> Result<CertifiedBound> {
    let f = fields(text)?;
    let get = |name: &str| f.iter().find(|x| x.1 == name).map(|x| (x.0, x.2.as_str()));
    let need = |name: &str| get(name).ok_or_else(|| Error::Parse { line: 0, msg: format!("missing `{name}`") });
    let rat = |name: &str| -> Result<Rational> {
        let (line, v) = need(name)?;
        parse_rational(v).map_err(|e| Error::Parse { line, msg: e.to_string() })
    };
    let int = |name: &str| -> Result<usize> {
        let (line, v) = need(name)?;
        v.parse().map_err(|_| Error::Parse { line, msg: format!("bad integer for `{name}`") })
    };
    match get("method").map(|m| m.1) {
        Some("asymptotic") => CertifiedBound::asymptotic(int("k")? as u64, &rat("theta")?, &rat("beta")?),
        Some("cutoff3d") => {
            let eps = match get("eps") {
                Some(_) => rat("eps")?,
                None => PiecewiseF::paper().eps,
            };
            let mut cutoff = match get("base").map(|b| b.1).unwrap_or("paper") {
                "paper" => PiecewiseF { eps: eps.clone(), ..PiecewiseF::paper() },
                "zero" => PiecewiseF::zero(eps.clone()),
                other => return Err(Error::Parse { line: need("base")?.0, msg: format!("unknown base {other:?}") }),
            };
            for (line, key, value) in &f {
                let mut chars = key.chars();
                if let (Some(c), None) = (chars.next(), chars.next()) {
                    let piece = Piece::from_letter(c).ok_or_else(|| Error::Parse { line: *line, msg: format!("unknown piece {c}") })?;
                    let p = Poly3::parse(value, &eps).map_err(|e| Error::Parse { line: *line, msg: e.to_string() })?;
                    cutoff = cutoff.with_piece(piece, p);
                }
            }
            CertifiedBound::cutoff(&cutoff)
        }
        Some("published") => {
            let k = int("k")?;
            let quantity = match need("quantity")?.1 {
                "mk" => Quantity::Mk { k },
                "mktrunc" => Quantity::MkTrunc { k, t: rat("t")? },
                "mkeps" => Quantity::MkEps { k, eps: rat("eps")? },
                other => {
                    return Err(Error::Parse { line: need("quantity")?.0, msg: format!("unknown quantity {other:?}") })
                }
            };
            let label = get("label").map(|l| l.1).unwrap_or("unlabelled");
            Ok(CertifiedBound::published(quantity, rat("value")?, label))
        }
        _ => {
            let cert = verify_certificate(&parse_certificate(text)?)?;
            CertifiedBound::from_certificate(&cert)
        }
    }
}

pub fn read_bound_file(path: impl AsRef<Path>) -> Result<CertifiedBound> {
    load_bound(&std::fs::read_to_string(path)?)
}
