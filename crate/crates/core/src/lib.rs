//! PIR array codes: the `[t x m, p]` storage model, constructions with
//! matching-based recovery certificates, exact k-PIR verification, exact
//! rate bounds and an in-process retrieval emulator.

pub mod bounds;
pub mod code;
pub mod constructions;
pub mod designs;
pub mod emulator;
pub mod error;
pub mod gf2;
pub mod matching;
pub mod scalar;
pub mod verifier;

pub use code::{example_7x4, PirArrayCode};
pub use error::{Error, Result};
pub use gf2::{BitVec, Gf2Basis};
pub use scalar::Scalar;
pub use verifier::{RecoveryCertificate, VerifierConfig, VerifierReport};

/// Exact rational used for every rate and bound.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;

pub type Database8 = emulator::Database<u8>;
pub type Database32 = emulator::Database<u32>;
/// Default emulator database: 64-bit parts.
pub type Database64 = emulator::Database<u64>;
pub type Database128 = emulator::Database<u128>;
