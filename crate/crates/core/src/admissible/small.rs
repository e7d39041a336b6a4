use super::{is_admissible_naive, Tuple};
use crate::error::{Error, Result};

/// Minimal diameter of an admissible `k`-tuple with diameter `<= dmax`, by
/// exhaustive search over offset sets starting at 0.
pub fn h_exact_small(k: usize, dmax: i64) -> Result<i64> {
    if !(1..=6).contains(&k) || !(0..=64).contains(&dmax) {
        return Err(Error::InvalidInput("exhaustive search needs k <= 6 and 0 <= dmax <= 64".into()));
    }
    if k == 1 {
        return Ok(0);
    }
    for d in 1..=dmax {
        // offsets 0 < h_2 < ... < h_{k-1} < d
        let mut found = false;
        choose(1, d, k - 2, &mut vec![0], &mut |inner| {
            let mut v = inner.to_vec();
            v.push(d);
            found |= is_admissible_naive(&Tuple { offsets: v });
            found
        });
        if found {
            return Ok(d);
        }
    }
    Err(Error::NoTupleWithin(dmax))
}

/// Calls `f` on `prefix` extended by every `r`-subset of `[lo, hi)`; stops when `f` returns true.
fn choose<F: FnMut(&[i64]) -> bool>(lo: i64, hi: i64, r: usize, prefix: &mut Vec<i64>, f: &mut F) -> bool {
    if r == 0 {
        return f(prefix);
    }
    for x in lo..hi {
        prefix.push(x);
        let stop = choose(x + 1, hi, r - 1, prefix, f);
        prefix.pop();
        if stop {
            return true;
        }
    }
    false
}
