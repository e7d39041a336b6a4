//! Prime tables.

/// All primes `<= n`, by an odd-only sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let half = ((n - 1) / 2) as usize; // odd numbers 3, 5, ..., indexed by (v-3)/2
    let mut composite = vec![false; half];
    let mut i = 0usize;
    loop {
        let p = 2 * i as u64 + 3;
        if p * p > n {
            break;
        }
        if !composite[i] {
            let mut j = ((p * p - 3) / 2) as usize;
            while j < half {
                composite[j] = true;
                j += p as usize;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity((n as f64 / (n as f64).ln().max(1.0) * 1.3) as usize + 2);
    out.push(2);
    out.extend(composite.iter().enumerate().filter(|(_, &c)| !c).map(|(i, _)| 2 * i as u64 + 3));
    out
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    let c = count.max(6) as f64;
    let mut bound = (c * (c.ln() + c.ln().ln()) * 1.05) as u64 + 16;
    loop {
        let ps = primes_up_to(bound);
        if ps.len() >= count {
            return ps[..count].to_vec();
        }
        bound = bound * 5 / 4;
    }
}

/// Number of primes `<= n`.
pub fn prime_pi(n: u64) -> usize {
    primes_up_to(n).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_up_to(2), vec![2]);
        assert!(primes_up_to(1).is_empty());
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
        assert_eq!(prime_pi(5511), 728);
        assert_eq!(prime_pi(1_000_000), 78498);
    }

    #[test]
    fn agrees_with_trial_division() {
        let ps = primes_up_to(2000);
        let slow: Vec<u64> = (2..=2000u64).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
        assert_eq!(ps, slow);
    }
}
