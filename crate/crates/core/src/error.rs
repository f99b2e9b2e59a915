use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} {value} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("set limit {set_limit} exceeds table limit {table_limit}")]
    InconsistentTables { set_limit: u64, table_limit: u64 },

    #[error("chain has no order-{0} set")]
    MissingOrder(u32),

    #[error("no known limit at or below ({a},{b}) to step from")]
    NotEstimable { a: u32, b: u32 },

    #[error("({a},{b}) has no verified limit")]
    UnknownPair { a: u32, b: u32 },

    #[error("report is incomplete; sequence emission requires a gap-free scan")]
    IncompleteReport,

    #[error("checkpoint belongs to {found}, expected {expected}")]
    CheckpointMismatch { expected: String, found: String },

    #[error("integrity: {0}")]
    Integrity(#[from] IntegrityError),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// File-format violations, one variant per distinct failure mode.
#[derive(Debug, Error)]
pub enum IntegrityError {
    #[error("bad magic {found:?}, expected {expected:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {0}")]
    BadVersion(u16),

    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    BadChecksum { stored: u64, computed: u64 },

    #[error("payload not strictly ascending at element {0}")]
    Unsorted(usize),

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("element {value} exceeds the stated limit {limit}")]
    ValueAboveLimit { value: u64, limit: u64 },

    #[error("invalid value {value}: {reason}")]
    InvalidValue { value: u64, reason: &'static str },
}
