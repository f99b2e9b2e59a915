//! Comet data series: per-n partition counts and their running statistics.
//!
//! The scatter of the partition count g(n) against n forms the familiar
//! comet shape; higher order pairs trace much narrower comets. This module
//! produces the raw count series, cumulative averages over an interval, and
//! the window-filtered count series used to compare plain partitions
//! against the 4*sqrt window.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iprime::IPrimeSet;
use crate::partition;
use crate::sieve::PrimeTable;

const CHUNK_NS: u64 = 1 << 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CometFilter {
    None,
    GkrcWindow,
}

/// How an averaged series accumulates its terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AverageMode {
    /// Cumulative mean of g over the interval prefix.
    RunningMean,
    /// Literal partial sums of g(k) / (k - n0 + 1).
    LiteralSum,
}

/// A plottable series of (n, value) points, ascending in n.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CometSeries {
    pub order_pair: (u32, u32),
    pub filter: CometFilter,
    pub points: Vec<(u64, f64)>,
}

fn find_pair<'c>(
    a: u32,
    b: u32,
    n_to: u64,
    chain: &'c [IPrimeSet],
) -> Result<(&'c IPrimeSet, &'c IPrimeSet)> {
    let (hi, lo) = (a.max(b), a.min(b));
    let find = |order: u32| {
        chain
            .iter()
            .find(|s| s.order() == order)
            .ok_or(Error::MissingOrder(order))
    };
    let a_set = find(hi)?;
    let b_set = find(lo)?;
    let coverage = a_set.limit().min(b_set.limit());
    if 2 * n_to > coverage + 3 {
        return Err(Error::OutOfRange {
            what: "series bound 2n",
            value: 2 * n_to,
            limit: coverage + 3,
        });
    }
    Ok((a_set, b_set))
}

/// Per-n partition counts over `n_from..=n_to`. An inverted range yields an
/// empty series.
pub fn g_series(
    a: u32,
    b: u32,
    n_from: u64,
    n_to: u64,
    chain: &[IPrimeSet],
) -> Result<CometSeries> {
    let counts = g_counts(a, b, n_from, n_to, chain)?;
    Ok(CometSeries {
        order_pair: (a.max(b), a.min(b)),
        filter: CometFilter::None,
        points: counts.into_iter().map(|(n, g)| (n, g as f64)).collect(),
    })
}

fn g_counts(
    a: u32,
    b: u32,
    n_from: u64,
    n_to: u64,
    chain: &[IPrimeSet],
) -> Result<Vec<(u64, u64)>> {
    if n_from > n_to {
        return Ok(Vec::new());
    }
    let (a_set, b_set) = find_pair(a, b, n_to, chain)?;
    let chunks: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut lo = n_from;
        while lo <= n_to {
            let hi = (lo + CHUNK_NS - 1).min(n_to);
            v.push((lo, hi));
            lo = hi + 1;
        }
        v
    };
    let per_chunk: Vec<Result<Vec<(u64, u64)>>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            (lo..=hi)
                .map(|n| Ok((n, partition::count_partitions(n, a_set, b_set)?)))
                .collect()
        })
        .collect();
    let mut counts = Vec::with_capacity((n_to - n_from + 1) as usize);
    for chunk in per_chunk {
        counts.extend(chunk?);
    }
    Ok(counts)
}

/// Cumulative averages of the count series over `[n0, m]`. The value at k
/// summarizes the prefix `n0..=k`; integer prefix sums keep the result
/// independent of chunked evaluation order.
pub fn g_average(
    a: u32,
    b: u32,
    n0: u64,
    m: u64,
    chain: &[IPrimeSet],
    mode: AverageMode,
) -> Result<CometSeries> {
    if n0 > m {
        return Err(Error::InvalidArgument(format!(
            "average interval is empty: [{n0}, {m}]"
        )));
    }
    let counts = g_counts(a, b, n0, m, chain)?;
    let mut points = Vec::with_capacity(counts.len());
    let mut sum = 0u64;
    let mut literal = 0.0f64;
    for (i, &(n, g)) in counts.iter().enumerate() {
        let value = match mode {
            AverageMode::RunningMean => {
                sum += g;
                sum as f64 / (i + 1) as f64
            }
            AverageMode::LiteralSum => {
                literal += g as f64 / (i + 1) as f64;
                literal
            }
        };
        points.push((n, value));
    }
    Ok(CometSeries {
        order_pair: (a.max(b), a.min(b)),
        filter: CometFilter::None,
        points,
    })
}

/// Per-n count of prime pairs (not necessarily distinct) with at least one
/// element inside the open window `(sqrt(2n), 4*sqrt(2n))`, each unordered
/// pair counted once.
pub fn gkrc_filtered_series(n_from: u64, n_to: u64, t: &PrimeTable) -> Result<CometSeries> {
    if n_from <= n_to && 2 * n_to > t.limit() {
        return Err(Error::OutOfRange {
            what: "series bound 2n",
            value: 2 * n_to,
            limit: t.limit(),
        });
    }
    let points = (n_from..=n_to)
        .map(|n| (n, count_window_pairs(2 * n, t) as f64))
        .collect();
    Ok(CometSeries {
        order_pair: (0, 0),
        filter: CometFilter::GkrcWindow,
        points,
    })
}

fn count_window_pairs(two_n: u64, t: &PrimeTable) -> u64 {
    let lo = two_n.isqrt() + 1;
    let primes = t.primes();
    let start = primes.partition_point(|&p| p < lo);
    let mut count = 0u64;
    for &p in &primes[start..] {
        if (p as u128) * (p as u128) >= 16 * two_n as u128 {
            break;
        }
        if p + 2 > two_n {
            break;
        }
        let q = two_n - p;
        if !t.is_prime_unchecked(q) {
            continue;
        }
        // q < p and q >= lo means the pair was already counted when the
        // iteration passed q (q below p is inside the upper bound for free)
        if q < p && q >= lo {
            continue;
        }
        count += 1;
    }
    count
}
