//! Random-coding rate regions of discrete memoryless interference networks.
//!
//! The crate computes the optimal rate region achievable by a fixed
//! `p`-distributed random code ensemble over a `(K, L)` discrete memoryless
//! interference network, in both its MAC form (a union of multiple-access
//! polytopes per receiver) and its min form. On top of that it provides the
//! decodable-set calculus, an exact-coefficient Fourier–Motzkin engine used
//! for the Han–Kobayashi projection, and a tiny-blocklength random-coding
//! simulator that evaluates the classical decoding rules exactly.
//!
//! All information quantities are in bits.

pub mod decodable;
pub mod error;
pub mod hk;
pub mod polytope;
pub mod prob;
pub mod random;
pub mod region;
pub mod sets;
pub mod sim;

pub use error::{Error, Result};
pub use sets::SenderSet;

/// Default cap on the number of entries of any dense probability table.
pub const DEFAULT_MAX_TABLE: usize = 10_000_000;

/// Environment variable overriding [`DEFAULT_MAX_TABLE`].
pub const MAX_TABLE_ENV: &str = "RRK_MAX_TABLE";

/// Cap on dense table sizes, honoring `RRK_MAX_TABLE` when set.
pub fn max_table_entries() -> usize {
    std::env::var(MAX_TABLE_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_TABLE)
}
