//! Independent oracles shared by the integration suites. Everything here is
//! deliberately written against no code from the crate under test: naive
//! sieving, deterministic Miller-Rabin, index-chain membership and a brute
//! double-loop partition enumerator.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Trial-division primality.
pub fn naive_is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the first twelve prime bases decide
/// primality for everything below 3.3e24).
pub fn mr_is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Plain bool-vector sieve, independent of the crate's bitset code.
pub fn naive_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_p = vec![true; n + 1];
    is_p[0] = false;
    if n >= 1 {
        is_p[1] = false;
    }
    let mut i = 2usize;
    while i * i <= n {
        if is_p[i] {
            let mut j = i * i;
            while j <= n {
                is_p[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| is_p[i]).map(|i| i as u64).collect()
}

/// Count primes at or below `limit` with Miller-Rabin alone.
pub fn mr_prime_count(limit: u64) -> u64 {
    if limit < 2 {
        return 0;
    }
    1 + (3..=limit).step_by(2).filter(|&n| mr_is_prime(n)).count() as u64
}

/// Order-i set via the index-chain rule: a prime belongs iff taking its
/// 1-based index i times stays prime at every step.
pub fn index_chain_set(limit: u64, order: u32) -> Vec<u64> {
    let primes = naive_primes(limit);
    let index_of = |v: u64| -> u64 {
        match primes.binary_search(&v) {
            Ok(i) => i as u64 + 1,
            Err(_) => 0,
        }
    };
    primes
        .iter()
        .copied()
        .filter(|&p| {
            let mut x = p;
            for _ in 0..order {
                if !naive_is_prime(x) {
                    return false;
                }
                x = index_of(x);
                if !naive_is_prime(x) {
                    return false;
                }
            }
            true
        })
        .collect()
}

/// Brute-force partition enumeration: a full double loop over both element
/// arrays with unordered dedup, rows canonicalized as (max, min).
pub fn brute_partitions(two_n: u64, a_els: &[u64], b_els: &[u64]) -> BTreeSet<(u64, u64)> {
    let mut found = BTreeSet::new();
    for &u in a_els {
        for &v in b_els {
            if u + v == two_n && u != v {
                found.insert((u.max(v), u.min(v)));
            }
        }
    }
    found
}

fn shift_to_sig(v: f64, sig: u32) -> (f64, f64) {
    debug_assert!(v > 0.0 && sig >= 1);
    let exp = v.log10().floor();
    let scale = 10f64.powf(exp - (sig as f64 - 1.0));
    (v / scale, scale)
}

/// Whether `value` prints as `displayed` at `sig` significant figures under
/// either round-half-up or truncation (published tables mix both).
pub fn matches_display(value: f64, displayed: f64, sig: u32) -> bool {
    let (m, scale) = shift_to_sig(value, sig);
    for candidate in [m.round() * scale, m.floor() * scale] {
        if (candidate / displayed - 1.0).abs() < 1e-6 {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn oracles_agree_with_each_other() {
        for n in 0..2_000u64 {
            assert_eq!(naive_is_prime(n), mr_is_prime(n), "n={n}");
        }
        assert_eq!(naive_primes(100).len(), 25);
        assert_eq!(mr_prime_count(1_000), 168);
    }

    #[test]
    fn display_matching() {
        assert!(matches_display(524_288.0, 5.2e5, 2));
        assert!(matches_display(189_812_531.0, 1.8e8, 2)); // truncated display
        assert!(matches_display(759_250_125.0, 7.6e8, 2)); // rounded display
        assert!(!matches_display(524_288.0, 5.3e5, 2));
        assert!(matches_display(7.0369e13, 7e13, 1));
    }
}
