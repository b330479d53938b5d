//! Random simplicial filtrations and their persistent homology, computed
//! exactly, together with the closed-form limits they converge to.
//!
//! The library has three layers:
//!
//! * **Simulation** — [`complex`] samples the random filtration in which every
//!   top-dimensional face of the complete `k`-dimensional complex on `n`
//!   vertices arrives at an i.i.d. uniform time in `[0, n]`, and materializes
//!   the signed incidence (coboundary) matrices of its snapshots.
//! * **Exact computation** — [`linalg`] does sparse rank over large prime
//!   fields (with a rational oracle at small scale) and the Karp–Sipser leaf
//!   removal peel with its additive rank certificate; [`persistence`] computes
//!   verbose persistence diagrams by boundary-matrix reduction, by a
//!   rank-difference grid, and by a greedy good-basis construction, three
//!   engines that must agree exactly.
//! * **Theory** — [`limits`] evaluates every closed-form limit (generating
//!   functions, the nullity functional and its fixed points, limiting diagram
//!   CDFs, diagonal masses); [`gw`] samples the matching multi-type
//!   Galton–Watson trees, runs population dynamics for the spectral atom at
//!   zero, and takes neighborhood censuses of Tanner graphs; [`experiments`]
//!   is the Monte Carlo harness that ties simulation to theory.
//!
//! All randomness flows from a single 64-bit seed through [`derive_seed`], so
//! every experiment regenerates bit-identically.

pub mod complex;
pub mod experiments;
pub mod field;
pub mod gw;
pub mod io;
pub mod limits;
pub mod linalg;
pub mod observable;
pub mod persistence;

use thiserror::Error;

/// Primary working prime, `2^61 - 1`.
pub const PRIME_PRIMARY: u64 = (1 << 61) - 1;
/// Confirmation prime, `2^31 - 1`.
pub const PRIME_CONFIRM: u64 = (1 << 31) - 1;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid face: {0}")]
    InvalidFace(String),
    #[error("invalid window: need r < s, got r = {r}, s = {s}")]
    InvalidWindow { r: f64, s: f64 },
    #[error("refusing beyond oracle scale: {0}")]
    OracleScale(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "rank disagreement between primes {p1} and {p2}: {r1} vs {r2}; \
         re-verify with the rational oracle"
    )]
    PrimeDisagreement { p1: u64, p2: u64, r1: u64, r2: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for a numbered substream of a master seed.
///
/// Stream `i` gets `splitmix64(seed0 + (i + 1) * GAMMA)`, the standard
/// SplitMix64 sequence offset by one so stream 0 differs from the master.
pub fn derive_seed(seed0: u64, stream: u64) -> u64 {
    splitmix64(seed0.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Binomial coefficient as `u64`; panics on overflow at scales far beyond
/// anything this crate enumerates.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}
