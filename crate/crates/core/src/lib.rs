//! Computational laboratory for the Sato–Tate statistics of one-parameter
//! families of elliptic curves `E(Z): Y² = X³ + f(Z)X + g(Z)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: prime-field arithmetic, residue and index tables, characters.
//! * [`family`]: the polynomial family, its discriminant and nondegeneracy.
//! * [`points`]: Frobenius traces and angles, batched per prime.
//! * [`stats`]: the Sato–Tate measure, `sym_n`, discrepancy estimators.
//! * [`params`]: parameter sets and arithmetic-function sieves.
//! * [`experiments`]: vertical and mixed counts, character sums, sums over primes.
//! * [`store`]: the persistent trace cache.

pub mod error;
pub mod experiments;
pub mod family;
pub mod field;
pub mod params;
pub mod points;
pub mod stats;
pub mod store;

pub use error::{Error, Result};
pub use experiments::Lab;
pub use family::{CurveInstance, FamilyPoly, Nondegeneracy};
pub use points::{Angle, TraceRecord};
pub use stats::{AngleSample, Interval};
pub use store::TraceCache;

/// 64-bit FNV-1a over a byte string.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}
