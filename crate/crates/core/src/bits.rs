//! Fixed-width bit strings backed by `u64`.
//!
//! Bit 0 of the underlying word is the least-significant bit; serialized
//! forms (wire payloads, hex) are most-significant-bit first. Widths are
//! capped at 64, which covers every desk-scale profile in this crate.

use crate::error::{Error, Result};

/// Masks `value` to its low `width` bits.
#[inline]
pub fn mask(value: u64, width: usize) -> u64 {
    debug_assert!(width <= 64);
    if width == 64 {
        value
    } else {
        value & ((1u64 << width) - 1)
    }
}

/// Parity of `word` (number of set bits mod 2).
#[inline]
pub fn parity(word: u64) -> u64 {
    (word.count_ones() & 1) as u64
}

/// Bit `i` (LSB order) of `value`.
#[inline]
pub fn bit(value: u64, i: usize) -> u64 {
    (value >> i) & 1
}

/// Packs the low `width` bits of `value` MSB-first, zero-padded to a whole
/// number of octets.
pub fn pack_msb(value: u64, width: usize) -> Vec<u8> {
    let nbytes = (width + 7) / 8;
    let mut out = vec![0u8; nbytes];
    for i in 0..width {
        // bit i counted from the most significant end of the field
        let b = (value >> (width - 1 - i)) & 1;
        out[i / 8] |= (b as u8) << (7 - (i % 8));
    }
    out
}

/// Inverse of [`pack_msb`]. Rejects payloads of the wrong length and
/// non-zero padding bits.
pub fn unpack_msb(bytes: &[u8], width: usize) -> Result<u64> {
    let nbytes = (width + 7) / 8;
    if bytes.len() != nbytes {
        return Err(Error::MalformedFrame(format!(
            "payload holds {} octets, width {} needs {}",
            bytes.len(),
            width,
            nbytes
        )));
    }
    let mut value = 0u64;
    for i in 0..width {
        let b = (bytes[i / 8] >> (7 - (i % 8))) & 1;
        value = (value << 1) | b as u64;
    }
    for i in width..nbytes * 8 {
        if (bytes[i / 8] >> (7 - (i % 8))) & 1 != 0 {
            return Err(Error::MalformedFrame("non-zero padding bits".into()));
        }
    }
    Ok(value)
}

/// Parses a binary literal such as "1010" into (value, width).
pub fn parse_bin(s: &str) -> Result<(u64, usize)> {
    if s.is_empty() || s.len() > 64 {
        return Err(Error::Parse(format!("bad bitstring {s:?}")));
    }
    let mut v = 0u64;
    for c in s.chars() {
        match c {
            '0' => v <<= 1,
            '1' => v = (v << 1) | 1,
            _ => return Err(Error::Parse(format!("bad bit {c:?} in {s:?}"))),
        }
    }
    Ok((v, s.len()))
}

/// Renders the low `width` bits of `value` MSB-first.
pub fn to_bin(value: u64, width: usize) -> String {
    (0..width)
        .map(|i| if bit(value, width - 1 - i) == 1 { '1' } else { '0' })
        .collect()
}

/// Parses "0x1F" or a plain decimal into a u64.
pub fn parse_u64(s: &str) -> Result<u64> {
    let s = s.trim();
    let r = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    r.map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}
