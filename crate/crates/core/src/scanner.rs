//! Exception scans over ranges of even numbers.
//!
//! A scan walks every even `2n` up to a bound, decides whether it admits a
//! partition (or a variant witness), and collects the failures. Work is
//! split into fixed-size chunks of consecutive evens; chunks are scanned in
//! parallel and merged in order, so reports are identical for any chunk
//! size or worker count. A checkpoint records the highest fully scanned
//! even plus the exceptions so far and can be resumed deterministically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, IntegrityError, Result};
use crate::gkc::GkcKind;
use crate::iprime::IPrimeSet;

const CHECKPOINT_MAGIC: [u8; 4] = *b"VGCK";
const CHECKPOINT_VERSION: u16 = 1;
/// Order values in a checkpoint at or above this base encode a variant tag
/// instead of an i-prime order pair.
const VARIANT_TAG_BASE: u64 = 1 << 32;

/// What a scan is testing: an order pair (normalized to a >= b) or one of
/// the window variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScanKey {
    Orders { a: u32, b: u32 },
    Variant(GkcKind),
}

impl ScanKey {
    /// Key for an order-pair scan; the pair is symmetric and stored a >= b.
    pub fn orders(a: u32, b: u32) -> Self {
        ScanKey::Orders {
            a: a.max(b),
            b: a.min(b),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ScanKey::Orders { a, b } => format!("order pair ({a},{b})"),
            ScanKey::Variant(kind) => format!("variant {kind}"),
        }
    }

    fn encode(&self) -> (u64, u64) {
        match *self {
            ScanKey::Orders { a, b } => (a as u64, b as u64),
            ScanKey::Variant(kind) => {
                let idx = GkcKind::ALL.iter().position(|&k| k == kind).unwrap() as u64;
                (VARIANT_TAG_BASE + idx, 0)
            }
        }
    }

    fn decode(a: u64, b: u64) -> Result<Self> {
        if a >= VARIANT_TAG_BASE {
            let idx = a - VARIANT_TAG_BASE;
            let kind = GkcKind::ALL
                .get(idx as usize)
                .copied()
                .ok_or(IntegrityError::InvalidValue {
                    value: a,
                    reason: "unknown variant tag",
                })?;
            if b != 0 {
                return Err(IntegrityError::InvalidValue {
                    value: b,
                    reason: "variant checkpoints carry no second order",
                }
                .into());
            }
            Ok(ScanKey::Variant(kind))
        } else {
            if a > u32::MAX as u64 || b > u32::MAX as u64 {
                return Err(IntegrityError::InvalidValue {
                    value: a.max(b),
                    reason: "order does not fit in 32 bits",
                }
                .into());
            }
            Ok(ScanKey::orders(a as u32, b as u32))
        }
    }
}

/// Outcome of a scan: every even number in `[2, scanned_to]` that has no
/// qualifying partition, in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionReport {
    pub key: ScanKey,
    /// Highest even number covered, inclusive.
    pub scanned_to: u64,
    /// Exceptions as `2n` values, strictly ascending.
    pub exceptions: Vec<u64>,
    /// True when the scan covered its range without gaps.
    pub complete: bool,
}

impl ExceptionReport {
    /// The candidate limit in `n` units: half the largest exception, or 0
    /// when the range held no exception. Only "verified up to
    /// `scanned_to / 2`" — never a proven last exception.
    pub fn candidate_limit(&self) -> u64 {
        self.exceptions.last().map_or(0, |&e| e / 2)
    }

    /// The order pair for order scans, `None` for variant scans.
    pub fn order_pair(&self) -> Option<(u32, u32)> {
        match self.key {
            ScanKey::Orders { a, b } => Some((a, b)),
            ScanKey::Variant(_) => None,
        }
    }

    /// The full exception sequence, available once the scan is gap-free.
    pub fn sequence(&self) -> Result<&[u64]> {
        if !self.complete {
            return Err(Error::IncompleteReport);
        }
        Ok(&self.exceptions)
    }
}

/// Chunking and checkpoint knobs for long scans.
#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Even numbers per work chunk.
    pub chunk_evens: usize,
    /// When set, the scan rewrites this checkpoint after each merged wave.
    pub checkpoint_path: Option<PathBuf>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            chunk_evens: 1 << 15,
            checkpoint_path: None,
        }
    }
}

/// Verified limits of the scanned-to-10^10 order pairs, keyed symmetrically.
#[derive(Clone, Debug)]
pub struct KnownLimits {
    entries: Vec<((u32, u32), u64)>,
}

impl KnownLimits {
    /// The ten experimentally verified entries.
    pub fn verified() -> Self {
        KnownLimits {
            entries: vec![
                ((0, 0), 3),
                ((1, 0), 3),
                ((2, 0), 2_564),
                ((1, 1), 40_306),
                ((3, 0), 125_771),
                ((2, 1), 1_765_126),
                ((4, 0), 6_204_163),
                ((3, 1), 32_050_472),
                ((2, 2), 161_352_166),
                ((5, 0), 260_535_479),
            ],
        }
    }

    /// Build a table from explicit entries; keys are normalized to a >= b.
    pub fn from_entries(entries: impl IntoIterator<Item = ((u32, u32), u64)>) -> Self {
        KnownLimits {
            entries: entries
                .into_iter()
                .map(|((a, b), l)| ((a.max(b), a.min(b)), l))
                .collect(),
        }
    }

    /// Look up L(a,b); symmetric in the pair.
    pub fn get(&self, a: u32, b: u32) -> Option<u64> {
        let key = (a.max(b), a.min(b));
        self.entries
            .iter()
            .find(|(k, _)| *k == key)
            .map(|&(_, l)| l)
    }

    /// All entries in canonical (a >= b) form.
    pub fn pairs(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.entries.iter().copied()
    }
}

/// Scan all evens in `[2, limit_2n]` for order-pair exceptions.
pub fn scan(a: u32, b: u32, limit_2n: u64, chain: &[IPrimeSet]) -> Result<ExceptionReport> {
    scan_with(a, b, limit_2n, chain, &ScanOptions::default(), |_| {})
}

/// [`scan`] with explicit options and a progress callback that receives the
/// highest fully scanned even number after each merged wave.
pub fn scan_with(
    a: u32,
    b: u32,
    limit_2n: u64,
    chain: &[IPrimeSet],
    opts: &ScanOptions,
    progress: impl FnMut(u64),
) -> Result<ExceptionReport> {
    let ctx = OrderScan::prepare(a, b, limit_2n, chain)?;
    run_scan(ctx.key, 2, limit_2n, Vec::new(), opts, progress, |lo, hi| {
        ctx.scan_chunk(lo, hi)
    })
}

/// Continue a checkpointed order-pair scan up to `limit_2n`. The checkpoint
/// must carry the same (symmetric) order pair; a checkpoint that already
/// covers the target is returned unchanged.
pub fn resume_scan(
    path: &Path,
    a: u32,
    b: u32,
    limit_2n: u64,
    chain: &[IPrimeSet],
    opts: &ScanOptions,
    progress: impl FnMut(u64),
) -> Result<ExceptionReport> {
    let ctx = OrderScan::prepare(a, b, limit_2n, chain)?;
    let ckpt = read_checkpoint(path)?;
    if ckpt.key != ctx.key {
        return Err(Error::CheckpointMismatch {
            expected: ctx.key.describe(),
            found: ckpt.key.describe(),
        });
    }
    if ckpt.scanned_to >= limit_2n {
        return Ok(ExceptionReport {
            key: ctx.key,
            scanned_to: ckpt.scanned_to,
            exceptions: ckpt.exceptions,
            complete: true,
        });
    }
    run_scan(
        ctx.key,
        ckpt.scanned_to + 2,
        limit_2n,
        ckpt.exceptions,
        opts,
        progress,
        |lo, hi| ctx.scan_chunk(lo, hi),
    )
}

/// Prepared inputs for an order-pair scan: the sparse set scanned
/// descending, the dense set searched by binary section, and a packed
/// bitset over the dense primes for O(1) pre-rejection.
struct OrderScan<'c> {
    key: ScanKey,
    sparse: &'c [u64],
    dense: &'c IPrimeSet,
    dense_is_primes: bool,
    prime_bits: Option<PrimeBits>,
}

impl<'c> OrderScan<'c> {
    fn prepare(a: u32, b: u32, limit_2n: u64, chain: &'c [IPrimeSet]) -> Result<Self> {
        if limit_2n < 4 || limit_2n % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "scan bound must be an even number >= 4, got {limit_2n}"
            )));
        }
        let (hi_order, lo_order) = (a.max(b), a.min(b));
        let find = |order: u32| {
            chain
                .iter()
                .find(|s| s.order() == order)
                .ok_or(Error::MissingOrder(order))
        };
        let a_set = find(hi_order)?;
        let b_set = find(lo_order)?;
        let coverage = a_set.limit().min(b_set.limit());
        if limit_2n > coverage + 3 {
            return Err(Error::OutOfRange {
                what: "scan bound 2n",
                value: limit_2n,
                limit: coverage + 3,
            });
        }
        let prime_bits = chain
            .iter()
            .find(|s| s.order() == 0)
            .map(|zero| PrimeBits::from_primes(limit_2n, zero.elements()));
        Ok(OrderScan {
            key: ScanKey::orders(a, b),
            sparse: a_set.elements(),
            dense: b_set,
            dense_is_primes: lo_order == 0,
            prime_bits,
        })
    }

    /// Exceptions among the evens `lo..=hi`, descending witness search per n.
    fn scan_chunk(&self, lo: u64, hi: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut top = self.sparse.partition_point(|&u| u < lo);
        let mut two_n = lo;
        while two_n <= hi {
            while top < self.sparse.len() && self.sparse[top] < two_n {
                top += 1;
            }
            if !self.has_witness(two_n, top) {
                out.push(two_n);
            }
            two_n += 2;
        }
        out
    }

    fn has_witness(&self, two_n: u64, top: usize) -> bool {
        for j in (0..top).rev() {
            let u = self.sparse[j];
            let d = two_n - u;
            if d == u {
                continue;
            }
            if let Some(bits) = &self.prime_bits {
                if !bits.is_prime(d) {
                    continue; // every candidate partner is prime
                }
                if self.dense_is_primes {
                    return true;
                }
            }
            if self.dense.contains_unchecked(d) {
                return true;
            }
        }
        false
    }
}

/// Shared scan driver: chunk the range, scan waves of chunks in parallel,
/// merge in order, checkpoint after each wave. `chunk_fn(lo, hi)` returns
/// the ascending exceptions among the evens `lo..=hi`.
pub(crate) fn run_scan(
    key: ScanKey,
    start_2n: u64,
    limit_2n: u64,
    prior: Vec<u64>,
    opts: &ScanOptions,
    mut progress: impl FnMut(u64),
    chunk_fn: impl Fn(u64, u64) -> Vec<u64> + Sync,
) -> Result<ExceptionReport> {
    if limit_2n < 4 || limit_2n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "scan bound must be an even number >= 4, got {limit_2n}"
        )));
    }
    if opts.chunk_evens == 0 {
        return Err(Error::InvalidArgument("chunk size must be positive".into()));
    }
    debug_assert!(start_2n >= 2 && start_2n % 2 == 0);

    let step = 2 * opts.chunk_evens as u64;
    let mut chunks = Vec::new();
    let mut lo = start_2n;
    while lo <= limit_2n {
        let hi = (lo + step - 2).min(limit_2n);
        chunks.push((lo, hi));
        lo = hi + 2;
    }

    let mut exceptions = prior;
    let wave = rayon::current_num_threads().max(1) * 4;
    for batch in chunks.chunks(wave) {
        let results: Vec<Vec<u64>> = batch.par_iter().map(|&(lo, hi)| chunk_fn(lo, hi)).collect();
        for found in results {
            exceptions.extend(found);
        }
        let scanned_to = batch.last().expect("batch is non-empty").1;
        if let Some(path) = &opts.checkpoint_path {
            write_checkpoint(path, key, scanned_to, &exceptions)?;
        }
        progress(scanned_to);
    }

    Ok(ExceptionReport {
        key,
        scanned_to: limit_2n,
        exceptions,
        complete: true,
    })
}

/// A persisted scan prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub key: ScanKey,
    pub scanned_to: u64,
    pub exceptions: Vec<u64>,
}

/// Write a checkpoint: magic "VGCK", version u16, then a, b, scanned_to,
/// exception count and exception values as little-endian u64. The write
/// goes to a sibling temp file first and renames into place.
pub fn write_checkpoint(
    path: &Path,
    key: ScanKey,
    scanned_to: u64,
    exceptions: &[u64],
) -> Result<()> {
    let mut buf = Vec::with_capacity(38 + 8 * exceptions.len());
    buf.extend_from_slice(&CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    let (a, b) = key.encode();
    buf.extend_from_slice(&a.to_le_bytes());
    buf.extend_from_slice(&b.to_le_bytes());
    buf.extend_from_slice(&scanned_to.to_le_bytes());
    buf.extend_from_slice(&(exceptions.len() as u64).to_le_bytes());
    for &e in exceptions {
        buf.extend_from_slice(&e.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&buf)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Read and validate a checkpoint file.
pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path)?;
    const HEADER: usize = 4 + 2 + 8 * 4;
    if bytes.len() < HEADER {
        return Err(IntegrityError::Truncated {
            expected: HEADER as u64,
            found: bytes.len() as u64,
        }
        .into());
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != CHECKPOINT_MAGIC {
        return Err(IntegrityError::BadMagic {
            expected: CHECKPOINT_MAGIC,
            found: magic,
        }
        .into());
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(IntegrityError::BadVersion(version).into());
    }
    let u64_at = |off: usize| u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
    let key = ScanKey::decode(u64_at(6), u64_at(14))?;
    let scanned_to = u64_at(22);
    if scanned_to % 2 != 0 {
        return Err(IntegrityError::InvalidValue {
            value: scanned_to,
            reason: "scanned_to must be even",
        }
        .into());
    }
    let count = u64_at(30);
    let expected = HEADER as u64 + 8 * count;
    if bytes.len() as u64 != expected {
        return Err(IntegrityError::Truncated {
            expected,
            found: bytes.len() as u64,
        }
        .into());
    }
    let mut exceptions = Vec::with_capacity(count as usize);
    for i in 0..count as usize {
        let value = u64_at(HEADER + 8 * i);
        if value % 2 != 0 {
            return Err(IntegrityError::InvalidValue {
                value,
                reason: "exceptions must be even",
            }
            .into());
        }
        if let Some(&prev) = exceptions.last() {
            if value <= prev {
                return Err(IntegrityError::Unsorted(i).into());
            }
        }
        if value > scanned_to {
            return Err(IntegrityError::ValueAboveLimit {
                value,
                limit: scanned_to,
            }
            .into());
        }
        exceptions.push(value);
    }
    Ok(Checkpoint {
        key,
        scanned_to,
        exceptions,
    })
}

/// Packed odd bitset over a prime set, for O(1) membership pre-checks.
pub(crate) struct PrimeBits {
    has_two: bool,
    words: Vec<u64>,
}

impl PrimeBits {
    pub(crate) fn from_primes(limit: u64, primes: &[u64]) -> Self {
        let n_odds = ((limit + 1) / 2) as usize;
        let mut words = vec![0u64; n_odds.div_ceil(64).max(1)];
        let mut has_two = false;
        for &p in primes {
            if p > limit {
                break;
            }
            if p == 2 {
                has_two = true;
            } else {
                let i = (p >> 1) as usize;
                words[i / 64] |= 1 << (i % 64);
            }
        }
        PrimeBits { has_two, words }
    }

    #[inline]
    pub(crate) fn is_prime(&self, m: u64) -> bool {
        if m == 2 {
            return self.has_two;
        }
        if m < 2 || m % 2 == 0 {
            return false;
        }
        let i = (m >> 1) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iprime::build_chain;
    use crate::partition::find_witness;
    use crate::sieve::PrimeTable;

    fn chain(limit: u64, max_order: u32) -> Vec<IPrimeSet> {
        let t = PrimeTable::sieve(limit).unwrap();
        build_chain(&t, max_order, limit).unwrap()
    }

    #[test]
    fn trivial_exceptions() {
        let c = chain(200, 1);
        let r = scan(0, 0, 100, &c).unwrap();
        assert_eq!(r.exceptions, vec![2, 4, 6]);
        assert_eq!(r.candidate_limit(), 3);
        assert!(r.complete);
        assert_eq!(r.sequence().unwrap(), &[2, 4, 6]);

        let r10 = scan(1, 0, 100, &c).unwrap();
        assert_eq!(r10.exceptions, vec![2, 4, 6]);
        assert_eq!(r10.candidate_limit(), 3);
    }

    #[test]
    fn headline_limit_at_desk_scale() {
        let c = chain(10_000, 2);
        let r = scan(2, 0, 10_000, &c).unwrap();
        assert_eq!(r.candidate_limit(), 2_564);
        assert_eq!(r.exceptions.last(), Some(&5_128));
        // every reported exception really has no witness, and the largest
        // non-exceptions all do
        for &e in r.exceptions.iter().rev().take(5) {
            assert_eq!(find_witness(e / 2, &c[2], &c[0]).unwrap(), None);
        }
        for n in (2_565..=5_000).step_by(617) {
            assert!(find_witness(n, &c[2], &c[0]).unwrap().is_some());
        }
    }

    #[test]
    fn symmetric_in_the_pair() {
        let c = chain(5_000, 2);
        let ab = scan(2, 0, 5_000, &c).unwrap();
        let ba = scan(0, 2, 5_000, &c).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab.order_pair(), Some((2, 0)));
    }

    #[test]
    fn chunking_does_not_change_reports() {
        let c = chain(20_000, 1);
        let baseline = scan(1, 1, 20_000, &c).unwrap();
        for chunk_evens in [1usize, 7, 100, 1 << 15] {
            let opts = ScanOptions {
                chunk_evens,
                checkpoint_path: None,
            };
            let r = scan_with(1, 1, 20_000, &c, &opts, |_| {}).unwrap();
            assert_eq!(r, baseline, "chunk_evens={chunk_evens}");
        }
    }

    #[test]
    fn validates_inputs() {
        let c = chain(100, 1);
        assert!(matches!(
            scan(3, 0, 100, &c),
            Err(Error::MissingOrder(3))
        ));
        assert!(matches!(
            scan(0, 0, 99, &c),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            scan(0, 0, 2, &c),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            scan(0, 0, 200, &c),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn incomplete_reports_refuse_sequences() {
        let r = ExceptionReport {
            key: ScanKey::orders(0, 0),
            scanned_to: 10,
            exceptions: vec![2, 4, 6],
            complete: false,
        };
        assert!(matches!(r.sequence(), Err(Error::IncompleteReport)));
    }

    #[test]
    fn checkpoint_roundtrip_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.vgck");
        let c = chain(10_000, 2);
        let opts = ScanOptions {
            chunk_evens: 256,
            checkpoint_path: Some(path.clone()),
        };

        let partial = scan_with(2, 0, 4_000, &c, &opts, |_| {}).unwrap();
        let ckpt = read_checkpoint(&path).unwrap();
        assert_eq!(ckpt.key, ScanKey::orders(2, 0));
        assert_eq!(ckpt.scanned_to, 4_000);
        assert_eq!(ckpt.exceptions, partial.exceptions);

        let resumed = resume_scan(&path, 2, 0, 10_000, &c, &opts, |_| {}).unwrap();
        let direct = scan(2, 0, 10_000, &c).unwrap();
        assert_eq!(resumed, direct);

        // resuming a finished scan leaves the report unchanged
        let unchanged = resume_scan(&path, 2, 0, 6_000, &c, &opts, |_| {}).unwrap();
        assert_eq!(unchanged.scanned_to, 10_000);
        assert_eq!(unchanged.exceptions, direct.exceptions);

        // mismatched pair is refused
        assert!(matches!(
            resume_scan(&path, 1, 0, 10_000, &c, &opts, |_| {}),
            Err(Error::CheckpointMismatch { .. })
        ));
    }

    #[test]
    fn checkpoint_integrity_errors_are_distinct() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.bin");
        write_checkpoint(&path, ScanKey::orders(1, 1), 100, &[2, 4, 6]).unwrap();

        let good = fs::read(&path).unwrap();

        fs::write(&path, &good[..good.len() - 3]).unwrap();
        assert!(matches!(
            read_checkpoint(&path),
            Err(Error::Integrity(IntegrityError::Truncated { .. }))
        ));

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        fs::write(&path, &bad_magic).unwrap();
        assert!(matches!(
            read_checkpoint(&path),
            Err(Error::Integrity(IntegrityError::BadMagic { .. }))
        ));

        let mut bad_version = good.clone();
        bad_version[4] = 0xFF;
        fs::write(&path, &bad_version).unwrap();
        assert!(matches!(
            read_checkpoint(&path),
            Err(Error::Integrity(IntegrityError::BadVersion(_)))
        ));

        fs::write(&path, &good).unwrap();
        let ckpt = read_checkpoint(&path).unwrap();
        assert_eq!(ckpt.exceptions, vec![2, 4, 6]);
    }

    #[test]
    fn variant_keys_roundtrip_in_checkpoints() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("variant.vgck");
        for kind in GkcKind::ALL {
            write_checkpoint(&path, ScanKey::Variant(kind), 50, &[2, 4]).unwrap();
            let ckpt = read_checkpoint(&path).unwrap();
            assert_eq!(ckpt.key, ScanKey::Variant(kind));
        }
    }

    #[test]
    fn known_limits_are_symmetric() {
        let known = KnownLimits::verified();
        assert_eq!(known.pairs().count(), 10);
        assert_eq!(known.get(2, 0), Some(2_564));
        assert_eq!(known.get(0, 2), Some(2_564));
        assert_eq!(known.get(5, 0), Some(260_535_479));
        assert_eq!(known.get(4, 1), None);
    }
}
