//! Sieve constructions of narrow admissible tuples.

use std::str::FromStr;

use rayon::prelude::*;

use super::io::ResidueSieve;
use super::{Checker, Tuple};
use crate::error::{Error, Result};
use crate::primes::first_primes;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SieveMethod {
    Eratosthenes,
    KPrimesPastK,
    HensleyRichards,
    ShiftedSchinzel,
    ShiftedGreedy,
}

impl FromStr for SieveMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eratosthenes" => SieveMethod::Eratosthenes,
            "k-primes-past-k" => SieveMethod::KPrimesPastK,
            "hensley-richards" => SieveMethod::HensleyRichards,
            "shifted-schinzel" => SieveMethod::ShiftedSchinzel,
            "shifted-greedy" => SieveMethod::ShiftedGreedy,
            _ => return Err(Error::InvalidInput(format!("unknown sieve method {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shift {
    Fixed(i64),
    /// Scan `s` over `range` (default `[-x/2, x/2]` with `x ~ k ln k`) with the
    /// given stride (default `max(1, x/1000)`), then refine around the best hit.
    Search { range: Option<(i64, i64)>, stride: Option<i64> },
}

#[derive(Clone, Debug)]
pub struct SieveConfig {
    pub method: SieveMethod,
    pub shift: Shift,
    /// Greedy primes whose classes are chosen against the same survivor set.
    pub batch: usize,
    /// Greedy choices start above `threshold_mult * sqrt(k ln k)`.
    pub threshold_mult: f64,
    /// Worker threads for the shift search; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl SieveConfig {
    pub fn new(method: SieveMethod) -> Self {
        SieveConfig {
            method,
            shift: Shift::Search { range: None, stride: None },
            batch: 1,
            threshold_mult: 2.0,
            threads: None,
        }
    }

    pub fn with_shift(mut self, shift: Shift) -> Self {
        self.shift = shift;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.batch == 0 {
            return Err(Error::InvalidInput("batch size must be positive".into()));
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(Error::InvalidInput("worker count must be positive".into()));
            }
            if t > 1 && self.batch > 1 && self.batch % t != 0 {
                return Err(Error::InvalidInput("batch size must be a multiple of the worker count".into()));
            }
        }
        Ok(())
    }
}

/// A tuple together with the residue classes that produced it, when the
/// construction is an interval sieve.
#[derive(Clone, Debug)]
pub struct SieveOutput {
    pub tuple: Tuple,
    pub residues: Option<ResidueSieve>,
}

pub fn sieve(k: usize, cfg: &SieveConfig) -> Result<SieveOutput> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    cfg.validate()?;
    let run = || -> Result<SieveOutput> {
        Ok(match cfg.method {
            SieveMethod::KPrimesPastK => SieveOutput { tuple: sieve_k_primes_past_k(k)?, residues: None },
            SieveMethod::Eratosthenes => SieveOutput { tuple: sieve_eratosthenes(k)?, residues: None },
            SieveMethod::HensleyRichards => SieveOutput { tuple: sieve_hensley_richards(k)?, residues: None },
            SieveMethod::ShiftedSchinzel => schinzel(k, cfg)?,
            SieveMethod::ShiftedGreedy => greedy(k, cfg)?,
        })
    };
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(run),
        None => run(),
    }
}

fn to_tuple(v: Vec<i64>) -> Result<Tuple> {
    Tuple::new(v)
}

/// `(p_{pi(k)+1}, ..., p_{pi(k)+k})`.
pub fn sieve_k_primes_past_k(k: usize) -> Result<Tuple> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let pi = Checker::new(k).primes().len();
    let ps = first_primes(pi + k);
    to_tuple(ps[pi..].iter().map(|&p| p as i64).collect())
}

/// Decreases `m` from `pi(k)` while the family member at `m - 1` stays
/// admissible modulo `p_m`, then raises `m` until the member is admissible
/// modulo every prime.
fn decremental<F: Fn(usize) -> Vec<i64>>(checker: &Checker, ps: &[u64], start: usize, family: F) -> Vec<i64> {
    let mut m = start;
    while m > 0 && checker.admissible_mod(&family(m - 1), ps[m - 1]) {
        m -= 1;
    }
    loop {
        let t = family(m);
        if checker.is_admissible(&t) {
            return t;
        }
        m += 1;
    }
}

/// `(p_{m+1}, ..., p_{m+k})` with `m` found by the decremental strategy.
pub fn sieve_eratosthenes(k: usize) -> Result<Tuple> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let checker = Checker::new(k);
    let pi = checker.primes().len();
    let ps = first_primes(pi + k);
    let t = decremental(&checker, &ps, pi, |m| ps[m..m + k].iter().map(|&p| p as i64).collect());
    to_tuple(t)
}

/// `(-p_{m+floor(k/2)-1}, ..., -p_{m+1}, -1, 1, p_{m+1}, ..., p_{m+floor((k+1)/2)-1})`.
pub fn sieve_hensley_richards(k: usize) -> Result<Tuple> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let checker = Checker::new(k);
    let pi = checker.primes().len();
    let left = k / 2 - 1;
    let right = (k + 1) / 2 - 1;
    let ps = first_primes(pi + left.max(right) + 1);
    let family = |m: usize| -> Vec<i64> {
        let mut v: Vec<i64> = ps[m..m + left].iter().rev().map(|&p| -(p as i64)).collect();
        v.push(-1);
        v.push(1);
        v.extend(ps[m..m + right].iter().map(|&p| p as i64));
        v
    };
    to_tuple(decremental(&checker, &ps, pi, family))
}

/// Modular inverse of 2 modulo an odd prime.
fn inv2(p: u64) -> u64 {
    p.div_ceil(2)
}

/// Survivors of the interval sieve are the even numbers `s0 + 2i`.
fn first_even(s: i64) -> i64 {
    if s.rem_euclid(2) == 0 {
        s
    } else {
        s + 1
    }
}

/// Index `i` of the first position `s0 + 2i` congruent to `r` modulo the odd prime `p`.
fn first_index(s0: i64, r: u64, p: u64) -> u64 {
    let diff = (r as i64 - s0).rem_euclid(p as i64) as u64;
    diff * inv2(p) % p
}

struct Bits {
    w: Vec<u64>,
}

impl Bits {
    fn new(n: usize) -> Self {
        Bits { w: vec![0; n.div_ceil(64)] }
    }
    fn set(&mut self, i: usize) {
        self.w[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.w[i / 64] &= !(1 << (i % 64));
    }
    fn get(&self, i: usize) -> bool {
        self.w[i / 64] >> (i % 64) & 1 == 1
    }
    fn prev_set(&self, i: usize) -> usize {
        let mut j = i;
        loop {
            j -= 1;
            if self.get(j) {
                return j;
            }
        }
    }
}

/// Does some class modulo `p` miss every survivor in `[0, end]`?
fn window_admissible_mod(bits: &Bits, s0: i64, end: usize, p: u64) -> bool {
    (0..p).any(|r| {
        let mut i = first_index(s0, r, p) as usize;
        while i <= end {
            if bits.get(i) {
                return false;
            }
            i += p as usize;
        }
        true
    })
}

/// Shifted Schinzel sieve at a fixed shift: sieve `1 mod 2` and `0 mod p` for
/// odd `p <= p_m` on `[s, s+x]`, keep the first `k` survivors, minimal `m`.
fn schinzel_at(k: usize, s: i64, checker: &Checker) -> (Vec<i64>, usize) {
    let primes = checker.primes();
    let pi = primes.len();
    let s0 = first_even(s);
    let kf = k as f64;
    let mut len = (kf * kf.ln() * 0.75) as usize + 64;
    loop {
        // lpf[i]: index (into `primes`) of the least odd prime <= k dividing s0 + 2i
        let mut lpf = vec![u32::MAX; len];
        for (j, &p) in primes.iter().enumerate().skip(1) {
            let mut i = first_index(s0, 0, p) as usize;
            while i < len {
                if lpf[i] == u32::MAX {
                    lpf[i] = j as u32;
                }
                i += p as usize;
            }
        }
        let mut bits = Bits::new(len);
        let mut count = 0usize;
        let mut end = usize::MAX;
        for (i, &l) in lpf.iter().enumerate() {
            if l == u32::MAX {
                bits.set(i);
                count += 1;
                if count == k {
                    end = i;
                    break;
                }
            }
        }
        if end == usize::MAX {
            len *= 2;
            continue;
        }
        for (i, &l) in lpf.iter().enumerate().skip(end + 1) {
            if l == u32::MAX {
                bits.set(i);
            }
        }
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); pi];
        for (i, &l) in lpf.iter().enumerate() {
            if (l as usize) < pi {
                buckets[l as usize].push(i as u32);
            }
        }
        // m = number of primes sieved (p_1 = 2 through p_m); start at pi(k)
        let mut m = pi;
        while m >= 2 {
            let j = m - 1; // index of p_m in `primes`
            let old_end = end;
            for &i in &buckets[j] {
                bits.set(i as usize);
                if (i as usize) < end {
                    count += 1;
                }
            }
            while count > k {
                end = bits.prev_set(end);
                count -= 1;
            }
            if window_admissible_mod(&bits, s0, end, primes[j]) {
                m -= 1;
            } else {
                for &i in &buckets[j] {
                    bits.clear(i as usize);
                }
                end = old_end;
                break;
            }
        }
        loop {
            let window: Vec<i64> = (0..=end).filter(|&i| bits.get(i)).map(|i| s0 + 2 * i as i64).collect();
            if checker.is_admissible(&window) {
                return (window, m);
            }
            // sieve p_{m+1} again and rebuild the window
            for &i in &buckets[m] {
                bits.clear(i as usize);
            }
            m += 1;
            let mut c = 0;
            end = usize::MAX;
            for i in 0..len {
                if bits.get(i) {
                    c += 1;
                    if c == k {
                        end = i;
                        break;
                    }
                }
            }
            assert!(end != usize::MAX, "survivor count only shrinks while m <= pi(k)");
        }
    }
}

fn search_grid(k: usize, shift: &Shift) -> (Vec<i64>, i64) {
    match shift {
        Shift::Fixed(s) => (vec![*s], 0),
        Shift::Search { range, stride } => {
            let kf = k as f64;
            let x = (kf * kf.ln()) as i64;
            let (lo, hi) = range.unwrap_or((-x / 2, x / 2));
            let step = stride.unwrap_or((x / 1000).max(1)).max(1);
            let mut grid = Vec::new();
            let mut s = lo;
            while s <= hi {
                grid.push(s);
                s += step;
            }
            (grid, step)
        }
    }
}

/// Runs `eval` over the shift grid, refines around the best coarse hit and
/// returns the best `(diameter, s, result)`; ties go to the smaller `s`.
fn shift_search<R: Send, F>(k: usize, shift: &Shift, eval: F) -> Option<(i64, i64, R)>
where
    F: Fn(i64) -> Option<(i64, R)> + Sync,
{
    let pick = |grid: Vec<i64>| -> Option<(i64, i64, R)> {
        grid.into_par_iter()
            .filter_map(|s| eval(s).map(|(d, r)| (d, s, r)))
            .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
    };
    let (grid, step) = search_grid(k, shift);
    let best = pick(grid)?;
    if step <= 1 {
        return Some(best);
    }
    let local: Vec<i64> = (best.1 - step + 1..best.1 + step).filter(|&s| s != best.1 && s % 2 == 0).collect();
    match pick(local) {
        Some(r) if (r.0, r.1) < (best.0, best.1) => Some(r),
        _ => Some(best),
    }
}

pub fn sieve_shifted_schinzel(k: usize, cfg: &SieveConfig) -> Result<Tuple> {
    let mut cfg = cfg.clone();
    cfg.method = SieveMethod::ShiftedSchinzel;
    Ok(sieve(k, &cfg)?.tuple)
}

fn schinzel(k: usize, cfg: &SieveConfig) -> Result<SieveOutput> {
    let checker = Checker::new(k);
    let (diam, _, (window, m)) = shift_search(k, &cfg.shift, |s| {
        let (w, m) = schinzel_at(k, s, &checker);
        Some((w[k - 1] - w[0], (w, m)))
    })
    .ok_or_else(|| Error::InvalidInput("empty shift range".into()))?;
    let tuple = to_tuple(window)?;
    let residues = ResidueSieve { k, s: tuple.offsets()[0], d: diam, m, classes: Vec::new() };
    Ok(SieveOutput { tuple, residues: Some(residues) })
}

struct GreedyRun {
    window: Vec<i64>,
    classes: Vec<(usize, u64)>,
}

/// Greedy sieve of `[s, s+x]`: fixed classes for primes up to the threshold,
/// then a minimally occupied class (smallest residue on ties) for each larger
/// prime `<= k`.
fn greedy_at(k: usize, s: i64, x: i64, primes: &[u64], split: usize, batch: usize) -> Option<GreedyRun> {
    let s0 = first_even(s);
    if x < 0 {
        return None;
    }
    let len = ((s + x - s0).max(-2) / 2 + 1) as usize;
    let mut alive = vec![true; len];
    for &p in &primes[1..split] {
        let mut i = first_index(s0, 0, p) as usize;
        while i < len {
            alive[i] = false;
            i += p as usize;
        }
    }
    let mut surv: Vec<i64> = (0..len).filter(|&i| alive[i]).map(|i| s0 + 2 * i as i64).collect();
    if surv.len() < k {
        return None;
    }
    let mut classes = Vec::with_capacity(primes.len() - split);
    let mut counts: Vec<u32> = Vec::new();
    let mut idx = split;
    while idx < primes.len() {
        let hi = (idx + batch).min(primes.len());
        let chosen: Vec<u64> = primes[idx..hi]
            .iter()
            .map(|&p| min_class(&surv, p, &mut counts))
            .collect();
        for (off, &r) in chosen.iter().enumerate() {
            classes.push((idx + off + 1, r));
        }
        surv.retain(|&n| {
            primes[idx..hi]
                .iter()
                .zip(&chosen)
                .all(|(&p, &r)| n.rem_euclid(p as i64) as u64 != r)
        });
        if surv.len() < k {
            return None;
        }
        idx = hi;
    }
    let (best, _) = (0..=surv.len() - k)
        .map(|i| (i, surv[i + k - 1] - surv[i]))
        .min_by_key(|&(i, d)| (d, i))?;
    Some(GreedyRun { window: surv[best..best + k].to_vec(), classes })
}

/// Minimally occupied residue class of `surv` modulo `p`, smallest on ties.
fn min_class(surv: &[i64], p: u64, counts: &mut Vec<u32>) -> u64 {
    counts.clear();
    counts.resize(p as usize, 0);
    let p = p as i64;
    let mut r = surv[0].rem_euclid(p);
    let mut prev = surv[0];
    for &n in surv {
        r += n - prev;
        while r >= p {
            r -= p;
        }
        prev = n;
        counts[r as usize] += 1;
    }
    let mut best = 0usize;
    for (i, &c) in counts.iter().enumerate() {
        if c < counts[best] {
            best = i;
            if c == 0 {
                break;
            }
        }
    }
    if counts[best] == 0 {
        // first empty class
        return counts.iter().position(|&c| c == 0).unwrap_or(best) as u64;
    }
    best as u64
}

/// Greedy run at shift `s` with (approximately) minimal interval length.
fn greedy_min_x(k: usize, s: i64, x0: i64, primes: &[u64], split: usize, batch: usize) -> Option<(i64, GreedyRun)> {
    let run = |x: i64| greedy_at(k, s, x, primes, split, batch);
    let grow = |x: i64| ((x as f64) * 1.05).ceil() as i64 + 2;
    let (mut lo, mut hi, mut best);
    let mut x = x0;
    match run(x) {
        Some(r) => {
            best = r;
            hi = x;
            loop {
                let smaller = ((x as f64) / 1.05) as i64;
                match run(smaller) {
                    Some(r) => {
                        best = r;
                        hi = smaller;
                        x = smaller;
                    }
                    None => {
                        lo = smaller;
                        break;
                    }
                }
            }
        }
        None => {
            lo = x;
            let mut tries = 0;
            loop {
                x = grow(x);
                tries += 1;
                if tries > 200 {
                    return None;
                }
                if let Some(r) = run(x) {
                    best = r;
                    hi = x;
                    break;
                }
                lo = x;
            }
        }
    }
    while hi - lo > 2 && (hi - lo) as f64 > hi as f64 * 5e-4 {
        let mid = lo + (hi - lo) / 2;
        match run(mid) {
            Some(r) => {
                best = r;
                hi = mid;
            }
            None => lo = mid,
        }
    }
    let d = best.window[k - 1] - best.window[0];
    Some((d, best))
}

pub fn sieve_shifted_greedy(k: usize, cfg: &SieveConfig) -> Result<Tuple> {
    let mut cfg = cfg.clone();
    cfg.method = SieveMethod::ShiftedGreedy;
    Ok(sieve(k, &cfg)?.tuple)
}

fn greedy(k: usize, cfg: &SieveConfig) -> Result<SieveOutput> {
    let checker = Checker::new(k);
    let primes = checker.primes();
    let kf = k as f64;
    let threshold = cfg.threshold_mult * (kf * kf.ln()).sqrt();
    let split = primes.iter().take_while(|&&p| (p as f64) <= threshold).count().max(1);
    let x0 = (kf * kf.ln()).max(4.0) as i64;
    let (_, _, (diam, run)) = shift_search(k, &cfg.shift, |s| {
        greedy_min_x(k, s, x0, primes, split, cfg.batch).map(|(d, r)| (d, (d, r)))
    })
    .ok_or_else(|| Error::InvalidInput("greedy sieve found no tuple".into()))?;
    if !checker.is_admissible(&run.window) {
        return Err(Error::NotAdmissible);
    }
    let tuple = to_tuple(run.window)?;
    let residues = ResidueSieve { k, s: tuple.offsets()[0], d: diam, m: split, classes: run.classes };
    Ok(SieveOutput { tuple, residues: Some(residues) })
}
