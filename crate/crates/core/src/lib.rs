//! Verification laboratory for vertical Goldbach-style conjectures.
//!
//! The pieces, bottom up:
//!
//! - [`sieve`]: prime generation with 1-based indexed access `p(x)`.
//! - [`iprime`]: iterated prime-indexed primes — order 0 is the primes,
//!   each lift maps `q` to the q-th prime, giving ever sparser subsets.
//! - [`partition`]: decompositions `2n = u + v` with `u`, `v` drawn from two
//!   chosen iteration orders and `u != v`.
//! - [`scanner`]: range scans collecting the even numbers with no such
//!   decomposition, with checkpoint/resume and the verified limit table.
//! - [`gkc`]: the window-constrained Goldbach variants.
//! - [`predictor`]: closed-form threshold and envelope families plus the
//!   step-4 extrapolation of unverified limits.
//! - [`comet`]: per-n count series and averages for comet plots.
//! - [`store`]: binary persistence of i-prime sets.

pub mod comet;
pub mod error;
pub mod gkc;
pub mod iprime;
pub mod partition;
pub mod predictor;
pub mod scanner;
pub mod sieve;
pub mod store;

pub use comet::{g_average, g_series, gkrc_filtered_series, AverageMode, CometFilter, CometSeries};
pub use error::{Error, IntegrityError, Result};
pub use gkc::{check as gkc_check, scan_variant, GkcKind};
pub use iprime::{build_chain, build_chain_streaming, lift, IPrimeSet};
pub use partition::{count_partitions, enumerate_partitions, find_witness, PartitionMatrix};
pub use predictor::{
    envelope_exponent, envelope_threshold, estimate_limit, ln_limit, threshold_x1, threshold_x2,
    PredictorTables,
};
pub use scanner::{
    read_checkpoint, resume_scan, scan, scan_with, write_checkpoint, ExceptionReport, KnownLimits,
    ScanKey, ScanOptions,
};
pub use sieve::{for_each_prime, PrimeTable};
