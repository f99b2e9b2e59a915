//! Vertical Goldbach partitions of an even number.
//!
//! A partition of `2n` for the order pair `(a, b)` is an unordered pair of
//! distinct values `u + v = 2n` with `u` drawn from the order-a set and `v`
//! from the order-b set. Rows are deduplicated as unordered pairs: when both
//! orientations qualify, the row keeps the orientation whose first element
//! is larger, which makes the first row of the descending enumeration equal
//! to the witness found by the descending scan.

use crate::error::{Error, Result};
use crate::iprime::IPrimeSet;

/// All partitions of one even number `2n` for one order pair, rows sorted
/// by descending first element. An empty matrix means `2n` is an exception.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionMatrix {
    n: u64,
    order_pair: (u32, u32),
    rows: Vec<(u64, u64)>,
}

impl PartitionMatrix {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn order_pair(&self) -> (u32, u32) {
        self.order_pair
    }

    pub fn rows(&self) -> &[(u64, u64)] {
        &self.rows
    }

    /// The partition count g(n) for this order pair.
    pub fn count(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn validate(n: u64, a: &IPrimeSet, b: &IPrimeSet) -> Result<()> {
    if a.order() < b.order() {
        return Err(Error::InvalidArgument(format!(
            "order pair must satisfy a >= b, got ({}, {})",
            a.order(),
            b.order()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    // both partition elements are at least 3 for 2n > 4, so coverage up to
    // 2n - 3 suffices
    let coverage = a.limit().min(b.limit());
    if 2 * n > coverage + 3 {
        return Err(Error::OutOfRange {
            what: "partition bound 2n",
            value: 2 * n,
            limit: coverage + 3,
        });
    }
    Ok(())
}

/// Walk candidate rows for `2n` in descending `u` order, applying the
/// unordered-pair dedup, and feed each surviving row to `emit`. Returning
/// `false` from `emit` stops the walk.
fn for_each_row(
    n: u64,
    a: &IPrimeSet,
    b: &IPrimeSet,
    mut emit: impl FnMut(u64, u64) -> bool,
) -> Result<()> {
    validate(n, a, b)?;
    let two_n = 2 * n;
    let els = a.elements();
    let hi = els.partition_point(|&u| u < two_n);
    for j in (0..hi).rev() {
        let u = els[j];
        let d = two_n - u;
        if d == u || d < 2 {
            continue;
        }
        if !b.contains_unchecked(d) {
            continue;
        }
        // mirror (d, u) was already emitted if it qualifies with the roles kept
        if d > u && a.contains_unchecked(d) && b.contains_unchecked(u) {
            continue;
        }
        if !emit(u, d) {
            break;
        }
    }
    Ok(())
}

/// Enumerate every partition of `2n`, sorted by descending first element.
pub fn enumerate_partitions(n: u64, a: &IPrimeSet, b: &IPrimeSet) -> Result<PartitionMatrix> {
    let mut rows = Vec::new();
    for_each_row(n, a, b, |u, v| {
        rows.push((u, v));
        true
    })?;
    Ok(PartitionMatrix {
        n,
        order_pair: (a.order(), b.order()),
        rows,
    })
}

/// The partition count g(n) without materializing rows.
pub fn count_partitions(n: u64, a: &IPrimeSet, b: &IPrimeSet) -> Result<u64> {
    let mut count = 0u64;
    for_each_row(n, a, b, |_, _| {
        count += 1;
        true
    })?;
    Ok(count)
}

/// The partition with maximal element of the order-a set, found by scanning
/// that set downwards from the largest element below `2n` and binary-searching
/// the complement. `None` when `2n` is an exception.
pub fn find_witness(n: u64, a: &IPrimeSet, b: &IPrimeSet) -> Result<Option<(u64, u64)>> {
    let mut witness = None;
    for_each_row(n, a, b, |u, v| {
        witness = Some((u, v));
        false
    })?;
    Ok(witness)
}
