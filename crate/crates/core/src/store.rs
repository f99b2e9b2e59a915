//! Binary persistence of i-prime sets.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "VGCP"
//! 4       2     format version (u16)
//! 6       2     set order (u16)
//! 8       8     limit (u64)
//! 16      8     element count (u64)
//! 24      8     CRC-64/XZ of the payload bytes (u64)
//! 32      8*n   elements, strictly ascending (u64 each)
//! ```
//!
//! Files carry no timestamps, so identical sets serialize byte-identically.

use std::fs;
use std::io::{BufWriter, Seek, SeekFrom, Write};
use std::path::Path;

use crate::error::{Error, IntegrityError, Result};
use crate::iprime::IPrimeSet;

const MAGIC: [u8; 4] = *b"VGCP";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 32;

/// Conventional file name for a stored set: `<order>_Px_up_to_<limit>.bin`.
pub fn standard_filename(order: u32, limit: u64) -> String {
    format!("{order}_Px_up_to_{limit}.bin")
}

/// Persist a set. The file is `32 + 8 * count` bytes.
pub fn save(s: &IPrimeSet, path: &Path) -> Result<()> {
    let order = u16::try_from(s.order()).map_err(|_| {
        Error::InvalidArgument(format!("order {} does not fit the format", s.order()))
    })?;
    let mut crc = Crc64::new();
    for &v in s.elements() {
        crc.update(&v.to_le_bytes());
    }
    let mut file = BufWriter::new(fs::File::create(path)?);
    write_header(
        &mut file,
        order,
        s.limit(),
        s.len() as u64,
        crc.finish(),
    )?;
    for &v in s.elements() {
        file.write_all(&v.to_le_bytes())?;
    }
    file.flush()?;
    Ok(())
}

/// Persist a set whose elements arrive from an iterator, without holding
/// them in memory. Returns the element count. Values must arrive strictly
/// ascending and within `limit`.
pub fn save_stream(
    order: u32,
    limit: u64,
    values: impl Iterator<Item = u64>,
    path: &Path,
) -> Result<u64> {
    let mut writer = StreamWriter::create(order, limit, path)?;
    for v in values {
        writer.push(v);
    }
    writer.finish()
}

/// Incremental writer for the set format: elements are appended one at a
/// time and the header is backpatched on [`finish`](Self::finish) once count
/// and checksum are known. Push failures are deferred to `finish` so the
/// writer can sit behind infallible callbacks.
pub struct StreamWriter {
    file: BufWriter<fs::File>,
    order: u16,
    limit: u64,
    crc: Crc64,
    count: u64,
    prev: Option<u64>,
    deferred: Option<Error>,
}

impl StreamWriter {
    pub fn create(order: u32, limit: u64, path: &Path) -> Result<Self> {
        let order = u16::try_from(order).map_err(|_| {
            Error::InvalidArgument(format!("order {order} does not fit the format"))
        })?;
        let mut file = BufWriter::new(fs::File::create(path)?);
        file.write_all(&[0u8; HEADER_LEN])?;
        Ok(StreamWriter {
            file,
            order,
            limit,
            crc: Crc64::new(),
            count: 0,
            prev: None,
            deferred: None,
        })
    }

    pub fn push(&mut self, v: u64) {
        if self.deferred.is_some() {
            return;
        }
        if self.prev.is_some_and(|p| v <= p) || v > self.limit {
            self.deferred = Some(Error::InvalidArgument(format!(
                "stream values must be strictly ascending and within {}, got {v}",
                self.limit
            )));
            return;
        }
        self.prev = Some(v);
        self.crc.update(&v.to_le_bytes());
        if let Err(e) = self.file.write_all(&v.to_le_bytes()) {
            self.deferred = Some(e.into());
            return;
        }
        self.count += 1;
    }

    pub fn finish(self) -> Result<u64> {
        let StreamWriter {
            mut file,
            order,
            limit,
            crc,
            count,
            deferred,
            ..
        } = self;
        if let Some(e) = deferred {
            return Err(e);
        }
        file.flush()?;
        let mut inner = file.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        inner.seek(SeekFrom::Start(0))?;
        let mut head = BufWriter::new(&mut inner);
        write_header(&mut head, order, limit, count, crc.finish())?;
        head.flush()?;
        drop(head);
        inner.sync_all()?;
        Ok(count)
    }
}

fn write_header(
    w: &mut impl Write,
    order: u16,
    limit: u64,
    count: u64,
    checksum: u64,
) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&order.to_le_bytes())?;
    w.write_all(&limit.to_le_bytes())?;
    w.write_all(&count.to_le_bytes())?;
    w.write_all(&checksum.to_le_bytes())?;
    Ok(())
}

/// Load a set, verifying magic, version, length, checksum, ordering and
/// the limit bound — each with its own error.
pub fn load(path: &Path) -> Result<IPrimeSet> {
    let bytes = fs::read(path)?;
    if bytes.len() < HEADER_LEN {
        return Err(IntegrityError::Truncated {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        }
        .into());
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(IntegrityError::BadMagic {
            expected: MAGIC,
            found: magic,
        }
        .into());
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != VERSION {
        return Err(IntegrityError::BadVersion(version).into());
    }
    let order = u16::from_le_bytes(bytes[6..8].try_into().unwrap()) as u32;
    let limit = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let count = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let stored_crc = u64::from_le_bytes(bytes[24..32].try_into().unwrap());

    let expected_len = HEADER_LEN as u64 + 8 * count;
    if (bytes.len() as u64) != expected_len {
        return Err(IntegrityError::Truncated {
            expected: expected_len,
            found: bytes.len() as u64,
        }
        .into());
    }
    let payload = &bytes[HEADER_LEN..];
    let mut crc = Crc64::new();
    crc.update(payload);
    let computed = crc.finish();
    if computed != stored_crc {
        return Err(IntegrityError::BadChecksum {
            stored: stored_crc,
            computed,
        }
        .into());
    }

    let mut elements = Vec::with_capacity(count as usize);
    for (i, chunk) in payload.chunks_exact(8).enumerate() {
        let v = u64::from_le_bytes(chunk.try_into().unwrap());
        if let Some(&prev) = elements.last() {
            if v <= prev {
                return Err(IntegrityError::Unsorted(i).into());
            }
        }
        if v > limit {
            return Err(IntegrityError::ValueAboveLimit { value: v, limit }.into());
        }
        elements.push(v);
    }
    Ok(IPrimeSet::from_parts(order, limit, elements))
}

/// CRC-64/XZ (reflected, poly 0x42F0E1EBA9EA3693).
pub(crate) struct Crc64 {
    state: u64,
}

impl Crc64 {
    pub fn new() -> Self {
        Crc64 { state: !0 }
    }

    pub fn update(&mut self, bytes: &[u8]) {
        for &byte in bytes {
            let idx = ((self.state ^ byte as u64) & 0xFF) as usize;
            self.state = CRC64_TABLE[idx] ^ (self.state >> 8);
        }
    }

    pub fn finish(&self) -> u64 {
        !self.state
    }
}

const fn crc64_table() -> [u64; 256] {
    // reflected form of the ECMA-182 polynomial
    const POLY: u64 = 0xC96C_5795_D787_0F42;
    let mut table = [0u64; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = i as u64;
        let mut bit = 0;
        while bit < 8 {
            crc = if crc & 1 != 0 { (crc >> 1) ^ POLY } else { crc >> 1 };
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

static CRC64_TABLE: [u64; 256] = crc64_table();
