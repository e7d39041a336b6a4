//! Admissible k-tuples: representation, admissibility tests, sieve
//! constructions and file formats.

mod io;
mod sieve;
mod small;

pub use io::{
    format_tuple, parse_tuple, read_residue_file, read_tuple_file, write_residue_file, write_tuple_file, ResidueSieve,
};
pub use sieve::{
    sieve, sieve_eratosthenes, sieve_hensley_richards, sieve_k_primes_past_k, sieve_shifted_greedy,
    sieve_shifted_schinzel, Shift, SieveConfig, SieveMethod, SieveOutput,
};
pub use small::h_exact_small;

use crate::error::{Error, Result};
use crate::primes::primes_up_to;

/// Strictly increasing integer offsets `h_1 < ... < h_k`, `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tuple {
    offsets: Vec<i64>,
}

impl Tuple {
    pub fn new(offsets: Vec<i64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidInput("a tuple needs at least one offset".into()));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("offsets must be strictly increasing".into()));
        }
        Ok(Tuple { offsets })
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn diameter(&self) -> i64 {
        self.offsets[self.offsets.len() - 1] - self.offsets[0]
    }

    pub fn shifted(&self, c: i64) -> Tuple {
        Tuple { offsets: self.offsets.iter().map(|h| h + c).collect() }
    }
}

/// Admissibility tester holding the primes `<= k`.
///
/// Large primes are first probed on a short window of residues through a
/// bitmap of the tuple; a full residue enumeration is the fallback.
#[derive(Clone, Debug)]
pub struct Checker {
    k: usize,
    primes: Vec<u64>,
    threshold: f64,
    window: u64,
}

impl Checker {
    pub fn new(k: usize) -> Self {
        let kf = k.max(2) as f64;
        Checker {
            k,
            primes: primes_up_to(k as u64),
            threshold: kf / kf.ln(),
            window: (3.0 * kf.ln()).ceil() as u64,
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_admissible(&self, offsets: &[i64]) -> bool {
        self.first_failure(offsets).is_none()
    }

    /// Smallest prime modulo which `offsets` covers every residue class.
    pub fn first_failure(&self, offsets: &[i64]) -> Option<u64> {
        if offsets.len() < 2 {
            return None;
        }
        debug_assert!(offsets.len() <= self.k || self.k == 0);
        let bitmap = Bitmap::from_offsets(offsets);
        let mut seen = Vec::new();
        self.primes.iter().copied().find(|&p| {
            if (p as f64) > self.threshold {
                let m = self.window.min(p - 1);
                if (0..=m).any(|r| !bitmap.class_occupied(r, p)) {
                    return false;
                }
            }
            covers_all(offsets, p, &mut seen)
        })
    }

    /// Full enumeration modulo a single prime.
    pub fn admissible_mod(&self, offsets: &[i64], p: u64) -> bool {
        !covers_all(offsets, p, &mut Vec::new())
    }
}

fn covers_all(offsets: &[i64], p: u64, seen: &mut Vec<bool>) -> bool {
    if (offsets.len() as u64) < p {
        return false;
    }
    seen.clear();
    seen.resize(p as usize, false);
    let mut count = 0u64;
    for &h in offsets {
        let r = h.rem_euclid(p as i64) as usize;
        if !seen[r] {
            seen[r] = true;
            count += 1;
            if count == p {
                return true;
            }
        }
    }
    false
}

/// Bit vector `b_i = 1` iff `h_1 + i` is in the tuple.
struct Bitmap {
    words: Vec<u64>,
    len: u64,
}

impl Bitmap {
    fn from_offsets(offsets: &[i64]) -> Self {
        let base = offsets[0];
        let len = (offsets[offsets.len() - 1] - base) as u64 + 1;
        let mut words = vec![0u64; len.div_ceil(64) as usize];
        for &h in offsets {
            let i = (h - base) as u64;
            words[(i / 64) as usize] |= 1 << (i % 64);
        }
        Bitmap { words, len }
    }

    fn get(&self, i: u64) -> bool {
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    /// Is some element congruent to `h_1 + r` modulo `p`?
    fn class_occupied(&self, r: u64, p: u64) -> bool {
        let mut i = r;
        while i < self.len {
            if self.get(i) {
                return true;
            }
            i += p;
        }
        false
    }
}

/// Two-phase admissibility test.
pub fn is_admissible(t: &Tuple) -> bool {
    Checker::new(t.k()).is_admissible(t.offsets())
}

/// Full residue enumeration modulo every prime `p <= k`.
pub fn is_admissible_naive(t: &Tuple) -> bool {
    let k = t.k() as u64;
    primes_up_to(k).into_iter().all(|p| {
        let mut seen = vec![false; p as usize];
        for &h in t.offsets() {
            seen[h.rem_euclid(p as i64) as usize] = true;
        }
        seen.contains(&false)
    })
}

/// Admissibility of raw offsets; rejects the empty tuple.
pub fn is_admissible_offsets(offsets: &[i64]) -> Result<bool> {
    Ok(is_admissible(&Tuple::new(offsets.to_vec())?))
}

/// First element followed by the `k - 1` positive gaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapEncoding {
    pub first: i64,
    pub gaps: Vec<u64>,
}

pub fn encode_gaps(t: &Tuple) -> GapEncoding {
    GapEncoding {
        first: t.offsets[0],
        gaps: t.offsets.windows(2).map(|w| (w[1] - w[0]) as u64).collect(),
    }
}

pub fn decode_gaps(g: &GapEncoding) -> Result<Tuple> {
    let mut offsets = Vec::with_capacity(g.gaps.len() + 1);
    let mut cur = g.first;
    offsets.push(cur);
    for &gap in &g.gaps {
        if gap == 0 {
            return Err(Error::Malformed("zero gap".into()));
        }
        cur = i64::try_from(gap)
            .ok()
            .and_then(|d| cur.checked_add(d))
            .ok_or_else(|| Error::Malformed("offset overflow".into()))?;
        offsets.push(cur);
    }
    Tuple::new(offsets)
}

impl GapEncoding {
    /// Byte stream: first offset (8 bytes LE), gap count (8 bytes LE), then one
    /// byte per gap below 256; larger gaps are written as `0` followed by 8 bytes LE.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.gaps.len());
        out.extend_from_slice(&self.first.to_le_bytes());
        out.extend_from_slice(&(self.gaps.len() as u64).to_le_bytes());
        for &g in &self.gaps {
            if (1..256).contains(&g) {
                out.push(g as u8);
            } else {
                out.push(0);
                out.extend_from_slice(&g.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let word = |at: usize| -> Result<[u8; 8]> {
            bytes
                .get(at..at + 8)
                .and_then(|s| s.try_into().ok())
                .ok_or_else(|| Error::Malformed("truncated stream".into()))
        };
        let first = i64::from_le_bytes(word(0)?);
        let n = u64::from_le_bytes(word(8)?) as usize;
        let mut gaps = Vec::with_capacity(n.min(bytes.len()));
        let mut at = 16;
        while gaps.len() < n {
            let b = *bytes.get(at).ok_or_else(|| Error::Malformed("truncated stream".into()))?;
            at += 1;
            if b == 0 {
                gaps.push(u64::from_le_bytes(word(at)?));
                at += 8;
            } else {
                gaps.push(b as u64);
            }
        }
        if at != bytes.len() {
            return Err(Error::Malformed("trailing bytes".into()));
        }
        Ok(GapEncoding { first, gaps })
    }
}
