//! Prime generation with O(1) indexed access.
//!
//! The sieve stores odd numbers only in a packed bitset (2 is handled
//! specially) and materializes the full prime array for indexed lookups,
//! using the 1-based convention `p(1) = 2, p(2) = 3, p(3) = 5`.
//!
//! Construction runs over fixed-size segments so the working set stays in
//! cache. Limits above [`MATERIALIZE_LIMIT`] are rejected by
//! [`PrimeTable::sieve`] because the prime array would dominate memory;
//! [`for_each_prime`] streams primes segment by segment instead and has no
//! such cap.

use crate::error::{Error, Result};

/// Largest limit for which `PrimeTable::sieve` materializes the prime array.
pub const MATERIALIZE_LIMIT: u64 = 1 << 32;

/// Hard ceiling on any sieve bound; 64-bit naturals only.
pub const LIMIT_CEILING: u64 = 1 << 63;

/// Odd indices per segment: 1 << 20 odds = 128 KiB of bits, L2-resident.
const SEGMENT_ODDS: usize = 1 << 20;

/// Immutable sieve result: packed odd bitset plus the sorted prime array.
///
/// Shareable across threads; all queries are read-only.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    odd_bits: Vec<u64>,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieve all primes `<= limit`.
    ///
    /// `limit` must be at least 2 and at most [`MATERIALIZE_LIMIT`].
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        if limit > MATERIALIZE_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "sieve limit {limit} exceeds the materialization threshold \
                 {MATERIALIZE_LIMIT}; use the streaming interfaces for larger bounds"
            )));
        }
        let n_odds = ((limit + 1) / 2) as usize;
        let mut odd_bits = vec![0u64; n_odds.div_ceil(64)];
        let mut primes = Vec::with_capacity(prime_count_upper_bound(limit));
        primes.push(2);
        walk_prime_segments(limit, |lo_idx, words, _| {
            odd_bits[lo_idx / 64..lo_idx / 64 + words.len()].copy_from_slice(words);
            for (wi, &word) in words.iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let bit = w.trailing_zeros() as usize;
                    primes.push(2 * (lo_idx + wi * 64 + bit) as u64 + 1);
                    w &= w - 1;
                }
            }
        });
        Ok(PrimeTable {
            limit,
            odd_bits,
            primes,
        })
    }

    /// Inclusive sieve bound.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of primes in the table, i.e. the prime-counting function at `limit`.
    pub fn count(&self) -> u64 {
        self.primes.len() as u64
    }

    /// The full ascending prime array.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// The x-th prime, 1-based: `nth_prime(1) = 2`.
    pub fn nth_prime(&self, x: u64) -> Result<u64> {
        if x == 0 || x > self.count() {
            return Err(Error::OutOfRange {
                what: "prime index",
                value: x,
                limit: self.count(),
            });
        }
        Ok(self.primes[(x - 1) as usize])
    }

    /// Inverse of [`nth_prime`](Self::nth_prime): the 1-based index of `p`.
    pub fn prime_index(&self, p: u64) -> Result<u64> {
        if p > self.limit {
            return Err(Error::OutOfRange {
                what: "prime value",
                value: p,
                limit: self.limit,
            });
        }
        match self.primes.binary_search(&p) {
            Ok(i) => Ok(i as u64 + 1),
            Err(_) => Err(Error::NotPrime(p)),
        }
    }

    /// Primality query for any `m <= limit`.
    pub fn is_prime(&self, m: u64) -> Result<bool> {
        if m > self.limit {
            return Err(Error::OutOfRange {
                what: "primality query",
                value: m,
                limit: self.limit,
            });
        }
        Ok(self.is_prime_unchecked(m))
    }

    /// Primality without the bound check; callers guarantee `m <= limit`.
    pub(crate) fn is_prime_unchecked(&self, m: u64) -> bool {
        if m == 2 {
            return true;
        }
        if m < 2 || m % 2 == 0 {
            return false;
        }
        let idx = (m >> 1) as usize;
        self.odd_bits[idx / 64] & (1 << (idx % 64)) != 0
    }
}

/// Visit every prime `<= limit` in ascending order without materializing
/// the prime array. Memory use is O(sqrt(limit)) plus one segment.
pub fn for_each_prime(limit: u64, mut f: impl FnMut(u64)) -> Result<()> {
    if limit < 2 {
        return Err(Error::InvalidArgument(format!(
            "sieve limit must be at least 2, got {limit}"
        )));
    }
    if limit >= LIMIT_CEILING {
        return Err(Error::InvalidArgument(format!(
            "sieve limit {limit} exceeds the 2^63 ceiling"
        )));
    }
    f(2);
    walk_prime_segments(limit, |lo_idx, words, _| {
        for (wi, &word) in words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                f(2 * (lo_idx + wi * 64 + bit) as u64 + 1);
                w &= w - 1;
            }
        }
    });
    Ok(())
}

/// Rosser–Schoenfeld style overestimate of the prime count, for Vec capacity.
fn prime_count_upper_bound(limit: u64) -> usize {
    if limit < 17 {
        return 8;
    }
    let n = limit as f64;
    (1.26 * n / n.ln()) as usize + 1
}

/// Plain odd-only sieve used for base primes up to sqrt(limit).
/// Bit i represents 2i + 1; a set bit means prime.
fn simple_odd_sieve(limit: u64) -> Vec<u64> {
    let n_odds = ((limit + 1) / 2).max(1) as usize;
    let mut words = vec![!0u64; n_odds.div_ceil(64)];
    words[0] &= !1; // 1 is not prime
    let mut i = 1usize; // value 3
    loop {
        let p = 2 * i as u64 + 1;
        if p * p > limit {
            break;
        }
        if words[i / 64] & (1 << (i % 64)) != 0 {
            let mut m = ((p * p) / 2) as usize;
            while m < n_odds {
                words[m / 64] &= !(1 << (m % 64));
                m += p as usize;
            }
        }
        i += 1;
    }
    clear_tail(&mut words, n_odds);
    words
}

fn clear_tail(words: &mut [u64], n_bits: usize) {
    let tail = n_bits % 64;
    if tail != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << tail) - 1;
        }
    }
}

/// Segmented sieve driver. Calls `seg_fn(first_odd_index, words, odd_count)`
/// for each segment of the odd bitset over 1..=limit, in ascending order.
/// Segment boundaries are multiples of 64 odds, so words map directly onto
/// a full-size bitset.
fn walk_prime_segments(limit: u64, mut seg_fn: impl FnMut(usize, &[u64], usize)) {
    let sqrt = limit.isqrt();
    let base_words = simple_odd_sieve(sqrt.max(3));
    let mut base_primes = Vec::new();
    for (wi, &word) in base_words.iter().enumerate() {
        let mut w = word;
        while w != 0 {
            let bit = w.trailing_zeros() as usize;
            let p = 2 * (wi * 64 + bit) as u64 + 1;
            if p <= sqrt {
                base_primes.push(p);
            }
            w &= w - 1;
        }
    }

    let total_odds = ((limit + 1) / 2) as usize;
    let mut words = vec![0u64; SEGMENT_ODDS / 64];
    let mut lo_idx = 0usize;
    while lo_idx < total_odds {
        let seg_odds = SEGMENT_ODDS.min(total_odds - lo_idx);
        let n_words = seg_odds.div_ceil(64);
        let seg = &mut words[..n_words];
        seg.fill(!0u64);
        if lo_idx == 0 {
            seg[0] &= !1; // 1 is not prime
        }
        let lo_val = 2 * lo_idx as u64 + 1;
        let hi_val = 2 * (lo_idx + seg_odds - 1) as u64 + 1;
        for &p in &base_primes {
            if p * p > hi_val {
                break;
            }
            // first odd multiple of p in the segment, at least p*p
            let mut m = lo_val.div_ceil(p) * p;
            if m % 2 == 0 {
                m += p;
            }
            m = m.max(p * p);
            if m > hi_val {
                continue;
            }
            let mut local = (m / 2) as usize - lo_idx;
            while local < seg_odds {
                seg[local / 64] &= !(1 << (local % 64));
                local += p as usize;
            }
        }
        clear_tail(seg, seg_odds);
        seg_fn(lo_idx, seg, seg_odds);
        lo_idx += seg_odds;
    }
}
