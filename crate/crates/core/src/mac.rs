//! One-time information-theoretically secure MAC over GF(2^m):
//! tag = k1 * msg + k2. Single-block messages only (|msg| = m).

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ff::Gf2m;

/// The 2m-bit key split into its two m-bit halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacKey {
    pub k1: u64,
    pub k2: u64,
}

impl MacKey {
    pub fn new(field: &Gf2m, k1: u64, k2: u64) -> Result<Self> {
        field.check(k1)?;
        field.check(k2)?;
        Ok(MacKey { k1, k2 })
    }

    /// Splits a packed 2m-bit word: high half is k1, low half is k2.
    pub fn from_word(field: &Gf2m, word: u64) -> Result<Self> {
        let m = field.width();
        MacKey::new(field, (word >> m) & ((1 << m) - 1), word & ((1 << m) - 1))
    }

    pub fn to_hex(&self, field: &Gf2m) -> String {
        let w = (field.width() + 3) / 4;
        format!("{:0w1$x},{:0w1$x}", self.k1, self.k2, w1 = w)
    }
}

pub fn mac_tag(field: &Gf2m, key: &MacKey, msg: u64) -> u64 {
    field.add(field.mul(key.k1, msg), key.k2)
}

pub fn mac_verify(field: &Gf2m, key: &MacKey, msg: u64, tag: u64) -> bool {
    mac_tag(field, key, msg) == tag
}
