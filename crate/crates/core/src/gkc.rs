//! Goldbach variants with an interval window above sqrt(2n).
//!
//! Each variant asks for a prime `p` inside a window derived from `2n` such
//! that `q = 2n - p` is also prime; the non-trivial ("nt") variants demand
//! `p != q`. Window bounds are resolved in integer arithmetic: `p > sqrt(2n)`
//! becomes `p >= isqrt(2n) + 1` whether or not `2n` is a perfect square, and
//! `p < 4*sqrt(2n)` becomes `p*p < 16*2n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scanner::{self, ExceptionReport, ScanKey, ScanOptions};
use crate::sieve::PrimeTable;

/// The four window-constrained Goldbach variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GkcKind {
    /// Prime in `(sqrt(2n), n]`, claimed for every even `2n > 4`.
    Gkc,
    /// Distinct pair with a prime in `(sqrt(2n), n)`, claimed for `2n > 14`.
    NtGkc,
    /// Prime in `(sqrt(2n), 4*sqrt(2n))`, claimed for every even `2n > 4`.
    Gkrc,
    /// Distinct pair with a prime in `(sqrt(2n), 4*sqrt(2n))`, claimed for `2n > 6`.
    NtGkrc,
}

impl GkcKind {
    pub const ALL: [GkcKind; 4] = [GkcKind::Gkc, GkcKind::NtGkc, GkcKind::Gkrc, GkcKind::NtGkrc];

    pub fn name(self) -> &'static str {
        match self {
            GkcKind::Gkc => "GKC",
            GkcKind::NtGkc => "ntGKC",
            GkcKind::Gkrc => "GKRC",
            GkcKind::NtGkrc => "ntGKRC",
        }
    }

    /// Whether the variant excludes the p = q = n case.
    pub fn distinct_required(self) -> bool {
        matches!(self, GkcKind::NtGkc | GkcKind::NtGkrc)
    }

    /// The even bound above which the variant is claimed to hold.
    pub fn stated_threshold(self) -> u64 {
        match self {
            GkcKind::Gkc | GkcKind::Gkrc => 4,
            GkcKind::NtGkc => 14,
            GkcKind::NtGkrc => 6,
        }
    }

    /// Inclusive lower window bound for `p`, i.e. the smallest integer
    /// strictly greater than sqrt(2n).
    pub fn window_lo(self, two_n: u64) -> u64 {
        two_n.isqrt() + 1
    }

    /// Whether `p` satisfies the variant's upper window bound.
    pub fn within_upper(self, two_n: u64, p: u64) -> bool {
        match self {
            GkcKind::Gkc => p <= two_n / 2,
            GkcKind::NtGkc => p < two_n / 2,
            GkcKind::Gkrc | GkcKind::NtGkrc => (p as u128) * (p as u128) < 16 * two_n as u128,
        }
    }
}

impl std::fmt::Display for GkcKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Find the variant's witness pair for `two_n`, scanning primes ascending
/// inside the window. `None` when `two_n` is an exception.
pub fn check(kind: GkcKind, two_n: u64, t: &PrimeTable) -> Result<Option<(u64, u64)>> {
    if two_n < 4 || two_n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "variant check needs an even number >= 4, got {two_n}"
        )));
    }
    if two_n > t.limit() {
        return Err(Error::OutOfRange {
            what: "variant check bound 2n",
            value: two_n,
            limit: t.limit(),
        });
    }
    Ok(check_unchecked(kind, two_n, t))
}

fn check_unchecked(kind: GkcKind, two_n: u64, t: &PrimeTable) -> Option<(u64, u64)> {
    let lo = kind.window_lo(two_n);
    let primes = t.primes();
    let start = primes.partition_point(|&p| p < lo);
    for &p in &primes[start..] {
        if !kind.within_upper(two_n, p) {
            break;
        }
        if p + 2 > two_n {
            break; // the 4*sqrt window can outgrow 2n itself when 2n is small
        }
        let q = two_n - p;
        if kind.distinct_required() && p == q {
            continue;
        }
        if t.is_prime_unchecked(q) {
            return Some((p, q));
        }
    }
    None
}

/// Scan all even numbers up to `limit_2n` and report the variant's exceptions.
pub fn scan_variant(kind: GkcKind, limit_2n: u64, t: &PrimeTable) -> Result<ExceptionReport> {
    scan_variant_with(kind, limit_2n, t, &ScanOptions::default(), |_| {})
}

/// [`scan_variant`] with explicit chunking/checkpoint options and a progress
/// callback receiving the highest fully scanned even number.
pub fn scan_variant_with(
    kind: GkcKind,
    limit_2n: u64,
    t: &PrimeTable,
    opts: &ScanOptions,
    progress: impl FnMut(u64),
) -> Result<ExceptionReport> {
    validate_scan(kind, limit_2n, t)?;
    scanner::run_scan(
        ScanKey::Variant(kind),
        2,
        limit_2n,
        Vec::new(),
        opts,
        progress,
        |lo, hi| scan_chunk(kind, lo, hi, t),
    )
}

/// Continue a checkpointed variant scan up to `limit_2n`. The checkpoint
/// must belong to the same variant; a finished scan is returned unchanged.
pub fn resume_scan_variant(
    path: &std::path::Path,
    kind: GkcKind,
    limit_2n: u64,
    t: &PrimeTable,
    opts: &ScanOptions,
    progress: impl FnMut(u64),
) -> Result<ExceptionReport> {
    validate_scan(kind, limit_2n, t)?;
    let ckpt = scanner::read_checkpoint(path)?;
    let key = ScanKey::Variant(kind);
    if ckpt.key != key {
        return Err(Error::CheckpointMismatch {
            expected: key.describe(),
            found: ckpt.key.describe(),
        });
    }
    if ckpt.scanned_to >= limit_2n {
        return Ok(ExceptionReport {
            key,
            scanned_to: ckpt.scanned_to,
            exceptions: ckpt.exceptions,
            complete: true,
        });
    }
    scanner::run_scan(
        key,
        ckpt.scanned_to + 2,
        limit_2n,
        ckpt.exceptions,
        opts,
        progress,
        |lo, hi| scan_chunk(kind, lo, hi, t),
    )
}

fn validate_scan(kind: GkcKind, limit_2n: u64, t: &PrimeTable) -> Result<()> {
    let _ = kind;
    if limit_2n > t.limit() {
        return Err(Error::OutOfRange {
            what: "scan bound 2n",
            value: limit_2n,
            limit: t.limit(),
        });
    }
    Ok(())
}

fn scan_chunk(kind: GkcKind, lo: u64, hi: u64, t: &PrimeTable) -> Vec<u64> {
    let mut exceptions = Vec::new();
    let mut two_n = lo;
    while two_n <= hi {
        if check_unchecked(kind, two_n, t).is_none() {
            exceptions.push(two_n);
        }
        two_n += 2;
    }
    exceptions
}
