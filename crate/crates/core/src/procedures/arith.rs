//! Prime-power arithmetic around the largest prime power `q <= l`.

use crate::field::is_prime_power;

/// The largest prime power `q <= l`, for `l >= 2`.
pub fn largest_prime_power_leq(l: u64) -> Option<u64> {
    (2..=l).rev().find(|&q| is_prime_power(q))
}

/// `l < 2q` for the largest prime power `q <= l`. Powers of two alone
/// already guarantee it, since `2^(k-1) < l <= 2^k`.
pub fn gap_check(l: u64) -> bool {
    largest_prime_power_leq(l).is_some_and(|q| l < 2 * q)
}

/// Largest prime power `<= l` for every `l` up to a limit, from a sieve of
/// smallest prime factors.
#[derive(Clone, Debug)]
pub struct PrimePowerTable {
    largest: Vec<u32>,
}

impl PrimePowerTable {
    pub fn new(limit: u32) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut largest = vec![0u32; n + 1];
        let mut last = 0u32;
        for i in 2..=n {
            let p = spf[i] as usize;
            let mut x = i;
            while x % p == 0 {
                x /= p;
            }
            if x == 1 {
                last = i as u32;
            }
            largest[i] = last;
        }
        PrimePowerTable { largest }
    }

    pub fn limit(&self) -> u64 {
        self.largest.len() as u64 - 1
    }

    pub fn largest_leq(&self, l: u64) -> Option<u64> {
        match self.largest.get(l as usize) {
            Some(&q) if q > 0 => Some(q as u64),
            _ => None,
        }
    }

    /// The first `l` in `2..=limit` with `l >= 2q`, if any.
    pub fn first_gap_failure(&self) -> Option<u64> {
        (2..=self.limit()).find(|&l| self.largest_leq(l).is_none_or(|q| l >= 2 * q))
    }
}
