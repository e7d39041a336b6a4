//! Tuple files and residue-class sieve files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::Tuple;
use crate::error::{Error, Result};
use crate::primes::first_primes;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with `#` comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// One offset per line; the first content line may be `k=<int>`.
pub fn parse_tuple(text: &str) -> Result<Tuple> {
    let mut declared = None;
    let mut offsets = Vec::new();
    for (idx, (line, l)) in content_lines(text).enumerate() {
        if let Some(rest) = l.strip_prefix("k=") {
            if idx != 0 {
                return Err(parse_err(line, "k= header must come first"));
            }
            declared = Some(rest.trim().parse::<usize>().map_err(|e| parse_err(line, e.to_string()))?);
            continue;
        }
        offsets.push(l.parse::<i64>().map_err(|e| parse_err(line, format!("{l:?}: {e}")))?);
    }
    if let Some(k) = declared {
        if k != offsets.len() {
            return Err(Error::SizeMismatch { expected: k, found: offsets.len() });
        }
    }
    Tuple::new(offsets)
}

pub fn format_tuple(t: &Tuple) -> String {
    let mut s = format!("k={}\n", t.k());
    for h in t.offsets() {
        writeln!(s, "{h}").unwrap();
    }
    s
}

pub fn read_tuple_file(path: impl AsRef<Path>) -> Result<Tuple> {
    parse_tuple(&fs::read_to_string(path)?)
}

pub fn write_tuple_file(path: impl AsRef<Path>, t: &Tuple) -> Result<()> {
    fs::write(path, format_tuple(t))?;
    Ok(())
}

/// Interval sieve description: on `[s, s+d]` remove the odd integers, `0 mod p_n`
/// for `1 < n <= m`, and `r mod p_n` for every `(n, r)` in `classes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSieve {
    pub k: usize,
    pub s: i64,
    pub d: i64,
    pub m: usize,
    pub classes: Vec<(usize, u64)>,
}

impl ResidueSieve {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 4 {
            return Err(parse_err(hl, "header must be `k s d m`"));
        }
        let num = |s: &str| s.parse::<i64>().map_err(|e| parse_err(hl, format!("{s:?}: {e}")));
        let (k, s, d, m) = (num(f[0])?, num(f[1])?, num(f[2])?, num(f[3])?);
        if k < 1 || d < 0 || m < 0 {
            return Err(parse_err(hl, "k must be positive, d and m non-negative"));
        }
        let mut classes = Vec::new();
        for (line, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            let idx = |s: &str| s.parse::<u64>().map_err(|e| parse_err(line, format!("{s:?}: {e}")));
            let (n, r) = match f.as_slice() {
                [n] => (idx(n)?, 0),
                [n, r] => (idx(n)?, idx(r)?),
                _ => return Err(parse_err(line, "expected `n r` or `n`")),
            };
            if n < 2 {
                return Err(parse_err(line, "prime index must be at least 2"));
            }
            classes.push((n as usize, r));
        }
        Ok(ResidueSieve { k: k as usize, s, d, m: m as usize, classes })
    }

    pub fn format(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.k, self.s, self.d, self.m);
        for &(n, r) in &self.classes {
            if r == 0 {
                writeln!(out, "{n}").unwrap();
            } else {
                writeln!(out, "{n} {r}").unwrap();
            }
        }
        out
    }

    /// Runs the sieve; the survivors must number exactly `k`.
    pub fn reconstruct(&self) -> Result<Tuple> {
        let top = self.classes.iter().map(|c| c.0).max().unwrap_or(0).max(self.m);
        let ps = first_primes(top);
        let len = (self.d + 1) as usize;
        let mut alive = vec![true; len];
        let mut strike = |p: u64, r: u64| {
            let first = (r as i64 - self.s).rem_euclid(p as i64) as usize;
            let mut i = first;
            while i < len {
                alive[i] = false;
                i += p as usize;
            }
        };
        strike(2, 1);
        for &p in ps.iter().take(self.m).skip(1) {
            strike(p, 0);
        }
        for &(n, r) in &self.classes {
            let p = ps[n - 1];
            strike(p, r % p);
        }
        let offsets: Vec<i64> = (0..len).filter(|&i| alive[i]).map(|i| self.s + i as i64).collect();
        if offsets.len() != self.k {
            return Err(Error::SizeMismatch { expected: self.k, found: offsets.len() });
        }
        Tuple::new(offsets)
    }
}

pub fn read_residue_file(path: impl AsRef<Path>) -> Result<ResidueSieve> {
    ResidueSieve::parse(&fs::read_to_string(path)?)
}

pub fn write_residue_file(path: impl AsRef<Path>, r: &ResidueSieve) -> Result<()> {
    fs::write(path, r.format())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_text_round_trip() {
        let t = parse_tuple("# comment\nk=3\n0\n2 # inline\n\n6\n").unwrap();
        assert_eq!(t.offsets(), &[0, 2, 6]);
        assert_eq!(parse_tuple(&format_tuple(&t)).unwrap(), t);
        assert!(matches!(parse_tuple("k=4\n0\n2\n6\n"), Err(Error::SizeMismatch { .. })));
        assert!(matches!(parse_tuple("0\nx\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_tuple("0\nk=1\n").is_err());
    }

    #[test]
    fn residue_sieve_reconstructs() {
        // evens of [0, 12] without 0 mod 3 are 2 4 8 10; then 8 = 3 mod 5 goes
        let r = ResidueSieve { k: 3, s: 0, d: 12, m: 2, classes: vec![(3, 3)] };
        let t = r.reconstruct().unwrap();
        assert_eq!(t.offsets(), &[2, 4, 10]);
        assert_eq!(ResidueSieve::parse(&r.format()).unwrap(), r);
        assert_eq!(ResidueSieve::parse("3 0 4 1\n").unwrap().reconstruct().unwrap().offsets(), &[0, 2, 4]);
        assert!(ResidueSieve::parse("1 2 3\n").is_err());
    }
}
