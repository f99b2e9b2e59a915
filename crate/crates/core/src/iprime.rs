//! Iterated prime-indexed primes.
//!
//! The order-0 set is the primes themselves. Lifting a set replaces every
//! element `q` by the q-th prime, so the order-1 set holds primes whose
//! index is prime (the super-primes) and order i applies the indexing
//! function i more times. Each lift is a subset of its predecessor.

use crate::error::{Error, Result};
use crate::sieve::{self, PrimeTable, LIMIT_CEILING};

/// Sorted set of order-i primes below a limit. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IPrimeSet {
    order: u32,
    limit: u64,
    elements: Vec<u64>,
}

impl IPrimeSet {
    pub(crate) fn from_parts(order: u32, limit: u64, elements: Vec<u64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(elements.last().is_none_or(|&e| e <= limit));
        IPrimeSet {
            order,
            limit,
            elements,
        }
    }

    /// The order-0 set: all primes of the table up to `limit`.
    pub fn order_zero(t: &PrimeTable, limit: u64) -> Result<Self> {
        if limit > t.limit() {
            return Err(Error::InconsistentTables {
                set_limit: limit,
                table_limit: t.limit(),
            });
        }
        let cut = t.primes().partition_point(|&p| p <= limit);
        Ok(IPrimeSet::from_parts(0, limit, t.primes()[..cut].to_vec()))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Membership by binary section over the sorted array, O(log n).
    pub fn contains(&self, m: u64) -> Result<bool> {
        if m > self.limit {
            return Err(Error::OutOfRange {
                what: "membership query",
                value: m,
                limit: self.limit,
            });
        }
        Ok(self.contains_unchecked(m))
    }

    pub(crate) fn contains_unchecked(&self, m: u64) -> bool {
        self.elements.binary_search(&m).is_ok()
    }
}

/// Lift a set one order up: `{ p(q) : q in s, p(q) <= s.limit }`.
///
/// The table must cover `s.limit`; index values never exceed the table's
/// prime count for elements that survive the limit filter.
pub fn lift(t: &PrimeTable, s: &IPrimeSet) -> Result<IPrimeSet> {
    if s.limit() > t.limit() {
        return Err(Error::InconsistentTables {
            set_limit: s.limit(),
            table_limit: t.limit(),
        });
    }
    let count = t.count();
    let mut elements = Vec::new();
    for &q in s.elements() {
        if q > count {
            break; // sorted, so every later index is out of reach too
        }
        let p = t.nth_prime(q)?;
        if p > s.limit() {
            break;
        }
        elements.push(p);
    }
    Ok(IPrimeSet::from_parts(s.order() + 1, s.limit(), elements))
}

/// Build the sets for orders `0..=max_order` below `limit`, truncating the
/// list early once a lift comes out empty.
pub fn build_chain(t: &PrimeTable, max_order: u32, limit: u64) -> Result<Vec<IPrimeSet>> {
    let mut chain = vec![IPrimeSet::order_zero(t, limit)?];
    for _ in 0..max_order {
        let next = lift(t, chain.last().expect("chain is non-empty"))?;
        if next.is_empty() {
            break;
        }
        chain.push(next);
    }
    Ok(chain)
}

/// Build the order `1..=max_order` sets below `limit` in a single streaming
/// pass, without materializing the order-0 array. Every order-0 prime is
/// handed to `on_zero_prime` as it is found; the return value pairs the
/// order-0 count with the higher-order sets.
///
/// Index primality is resolved against a small auxiliary table covering the
/// prime-count bound of `limit`, and order i >= 2 membership by a cursor
/// into the already-built order i-1 set (indexes arrive in ascending order).
pub fn build_chain_streaming(
    max_order: u32,
    limit: u64,
    mut on_zero_prime: impl FnMut(u64),
) -> Result<(u64, Vec<IPrimeSet>)> {
    if limit < 2 {
        return Err(Error::InvalidArgument(format!(
            "chain limit must be at least 2, got {limit}"
        )));
    }
    if limit >= LIMIT_CEILING {
        return Err(Error::InvalidArgument(format!(
            "chain limit {limit} exceeds the 2^63 ceiling"
        )));
    }
    let index_bound = index_table_bound(limit);
    let index_table = PrimeTable::sieve(index_bound)?;

    let mut sets: Vec<Vec<u64>> = vec![Vec::new(); max_order as usize];
    let mut cursors = vec![0usize; max_order.saturating_sub(1) as usize];
    let mut index = 0u64;
    sieve::for_each_prime(limit, |p| {
        index += 1;
        if max_order == 0 {
            on_zero_prime(p);
            return;
        }
        // order 1: the index itself must be prime
        debug_assert!(index <= index_bound, "index table sized too small");
        let mut member = index_table.is_prime_unchecked(index);
        if member {
            sets[0].push(p);
        }
        // order i: the index must belong to the order i-1 set, which is
        // complete below p because indexes are strictly smaller than values
        for i in 1..max_order as usize {
            if !member {
                break;
            }
            let cur = &mut cursors[i - 1];
            while *cur < sets[i - 1].len() && sets[i - 1][*cur] < index {
                *cur += 1;
            }
            member = sets[i - 1].get(*cur) == Some(&index);
            if member {
                sets[i].push(p);
            }
        }
        on_zero_prime(p);
    })?;

    let mut chain = Vec::new();
    for (i, elements) in sets.into_iter().enumerate() {
        if elements.is_empty() {
            break;
        }
        chain.push(IPrimeSet::from_parts(i as u32 + 1, limit, elements));
    }
    Ok((index, chain))
}

/// Upper bound on the prime count below `limit`, so index primality queries
/// stay inside the auxiliary table.
fn index_table_bound(limit: u64) -> u64 {
    if limit < 100 {
        return 64;
    }
    let n = limit as f64;
    (1.26 * n / n.ln()) as u64 + 64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(limit: u64) -> PrimeTable {
        PrimeTable::sieve(limit).unwrap()
    }

    #[test]
    fn lift_produces_super_primes() {
        let t = table(100);
        let zero = IPrimeSet::order_zero(&t, 100).unwrap();
        let one = lift(&t, &zero).unwrap();
        assert_eq!(one.order(), 1);
        assert_eq!(&one.elements()[..5], &[3, 5, 11, 17, 31]);
        let two = lift(&t, &one).unwrap();
        assert_eq!(two.order(), 2);
        assert_eq!(two.elements(), &[5, 11, 31, 59]); // 127 > 100
    }

    #[test]
    fn second_lift_first_elements() {
        let t = table(1_000);
        let chain = build_chain(&t, 2, 1_000).unwrap();
        assert_eq!(&chain[2].elements()[..5], &[5, 11, 31, 59, 127]);
    }

    #[test]
    fn lift_of_empty_is_empty() {
        let t = table(100);
        let empty = IPrimeSet::from_parts(3, 100, vec![]);
        let lifted = lift(&t, &empty).unwrap();
        assert_eq!(lifted.order(), 4);
        assert!(lifted.is_empty());
    }

    #[test]
    fn lift_requires_covering_table() {
        let t = table(50);
        let s = IPrimeSet::from_parts(0, 100, vec![2, 3, 5]);
        assert!(matches!(
            lift(&t, &s),
            Err(Error::InconsistentTables { .. })
        ));
    }

    #[test]
    fn chain_variants() {
        let t = table(100);
        let chain = build_chain(&t, 2, 100).unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain[2].elements(), &[5, 11, 31, 59]);

        let t10 = table(10);
        let chain = build_chain(&t10, 0, 10).unwrap();
        assert_eq!(chain.len(), 1);
        assert_eq!(chain[0].elements(), &[2, 3, 5, 7]);
    }

    #[test]
    fn chain_truncates_when_a_lift_vanishes() {
        let t = table(10);
        // orders: {2,3,5,7} -> {3,5} -> {5} -> {} truncated
        let chain = build_chain(&t, 7, 10).unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain[1].elements(), &[3, 5]);
        assert_eq!(chain[2].elements(), &[5]);
    }

    #[test]
    fn membership() {
        let t = table(100);
        let chain = build_chain(&t, 1, 100).unwrap();
        assert!(chain[1].contains(11).unwrap());
        assert!(!chain[1].contains(7).unwrap()); // 7 = p(4), 4 composite
        assert!(chain[0].contains(2).unwrap());
        assert!(matches!(
            chain[1].contains(101),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn nesting_and_decay() {
        let t = table(100_000);
        let chain = build_chain(&t, 6, 100_000).unwrap();
        for pair in chain.windows(2) {
            let (outer, inner) = (&pair[0], &pair[1]);
            assert!(inner.len() < outer.len(), "cardinality must decay");
            for &m in inner.elements() {
                assert!(outer.contains_unchecked(m));
            }
        }
    }

    #[test]
    fn streaming_matches_table_chain() {
        let t = table(100_000);
        let expected = build_chain(&t, 4, 100_000).unwrap();
        let mut zero = Vec::new();
        let (count, chain) = build_chain_streaming(4, 100_000, |p| zero.push(p)).unwrap();
        assert_eq!(count, t.count());
        assert_eq!(zero, expected[0].elements());
        assert_eq!(chain.len(), expected.len() - 1);
        for (got, want) in chain.iter().zip(&expected[1..]) {
            assert_eq!(got.order(), want.order());
            assert_eq!(got.elements(), want.elements());
        }
    }
}
