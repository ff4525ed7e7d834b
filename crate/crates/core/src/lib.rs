//! extractorlab: randomness-extraction constructions with exact desk-scale
//! verification oracles.
//!
//! Modules:
//! - [`ff`]: exact prime-field, binary-field and extension-field arithmetic;
//! - [`dist`]: finite distributions, weak sources and the classical
//!   statistical oracle;
//! - [`xtr`]: the inner-product extractor, two-wise independent families,
//!   the non-malleable extractor and a Trevisan-style seeded extractor;
//! - [`mac`]: the one-time polynomial MAC over GF(2^m);
//! - [`nmtest`]: exhaustive brute-force error sweeps and forgery bounds;
//! - [`qcheck`]: small-dimension quantum states and the numerical theorem
//!   checks;
//! - [`pa`]: the two-round privacy-amplification protocol with an active
//!   adversary, its wire format, and the session/audit runners.

pub mod bits;
pub mod dist;
pub mod error;
pub mod ff;
pub mod mac;
pub mod nmtest;
pub mod pa;
pub mod qcheck;
pub mod scalar;
pub mod xtr;

pub use error::{Error, Result};

/// Exact-probability distribution (rational arithmetic).
pub type DistR = dist::Dist<num::rational::BigRational>;
/// Floating-point distribution.
pub type DistF = dist::Dist<f64>;

/// Artifact version stamped into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
