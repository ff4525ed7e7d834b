//! Exact arithmetic over prime fields F_p, binary fields GF(2^m) and general
//! extension fields GF(p^k), plus the bitstring <-> field-vector encodings
//! used at protocol boundaries.
//!
//! All values are canonical representatives held in `u64`; products go
//! through `u128`, so moduli up to 2^61 are safe. Nothing here is
//! constant-time.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic Miller-Rabin, valid for every u64 with this witness set.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    loop {
        if is_prime(c) {
            return c;
        }
        c += 1;
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// A prime field F_p. Construction verifies primality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn check(&self, a: u64) -> Result<u64> {
        if a < self.p {
            Ok(a)
        } else {
            Err(Error::ElementOutOfRange(a))
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }

    /// Multiplicative inverse; zero is rejected.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a % self.p == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(pow_mod(a, self.p - 2, self.p))
    }
}

// ---------------------------------------------------------------------------
// Polynomials over F_p, coefficient order low-to-high.
// ---------------------------------------------------------------------------

fn poly_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    if v.is_empty() {
        v.push(0);
    }
}

fn poly_is_zero(v: &[u64]) -> bool {
    v.iter().all(|&c| c == 0)
}

fn poly_mul(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(ai, bj));
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(f: &PrimeField, a: &[u64], m: &[u64]) -> Vec<u64> {
    let deg_m = m.len() - 1;
    let mut r: Vec<u64> = a.to_vec();
    while r.len() > deg_m {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - deg_m;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = f.sub(r[idx], f.mul(lead, mi));
            }
        }
        r.pop();
    }
    poly_trim(&mut r);
    r
}

fn poly_gcd(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !poly_is_zero(&b) {
        // make b monic before reducing so poly_rem applies
        let lead_inv = f.inv(*b.last().unwrap()).expect("non-zero lead");
        let monic: Vec<u64> = b.iter().map(|&c| f.mul(c, lead_inv)).collect();
        let r = poly_rem(f, &a, &monic);
        a = b;
        b = r;
    }
    a
}

/// x^(p^e) mod m, by repeated Frobenius via square-and-multiply on the
/// exponent p^e.
fn poly_pow_x(f: &PrimeField, e: u32, m: &[u64]) -> Vec<u64> {
    // compute x^(p^e) mod m as ((x^p)^p ...) iterated e times
    let x = vec![0u64, 1];
    let mut acc = poly_rem(f, &x, m);
    for _ in 0..e {
        acc = poly_pow_scalar(f, &acc, f.modulus(), m);
    }
    acc
}

fn poly_pow_scalar(f: &PrimeField, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(f, &poly_mul(f, &acc, &b), m);
        }
        b = poly_rem(f, &poly_mul(f, &b, &b), m);
        e >>= 1;
    }
    acc
}

/// Rabin irreducibility test for a monic polynomial of degree k over F_p:
/// x^(p^k) = x mod f, and gcd(x^(p^(k/r)) - x, f) = 1 for every prime r | k.
pub fn is_irreducible(f: &PrimeField, poly: &[u64]) -> bool {
    let k = poly.len() - 1;
    if k == 0 || *poly.last().unwrap() != 1 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let xpk = poly_pow_x(f, k as u32, poly);
    // x^(p^k) - x must be 0 mod poly
    let mut diff = xpk.clone();
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = f.sub(diff[1], 1);
    poly_trim(&mut diff);
    if !(diff.len() == 1 && diff[0] == 0) {
        return false;
    }
    let mut rem = k;
    let mut r = 2;
    let mut prime_divisors = Vec::new();
    while r * r <= rem {
        if rem % r == 0 {
            prime_divisors.push(r);
            while rem % r == 0 {
                rem /= r;
            }
        }
        r += 1;
    }
    if rem > 1 {
        prime_divisors.push(rem);
    }
    for r in prime_divisors {
        let mut d = poly_pow_x(f, (k / r) as u32, poly);
        if d.len() < 2 {
            d.resize(2, 0);
        }
        d[1] = f.sub(d[1], 1);
        poly_trim(&mut d);
        let g = poly_gcd(f, poly, &d);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// An extension field GF(p^k) presented as F_p[t]/(modulus).
///
/// The modulus is monic and verified irreducible at construction. Elements
/// are coefficient vectors of length `degree`, low-order coefficient first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtField {
    base: PrimeField,
    degree: usize,
    modulus: Vec<u64>,
}

impl ExtField {
    pub fn new(base: PrimeField, modulus: Vec<u64>) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::InvalidParameter("modulus must have degree >= 1".into()));
        }
        for &c in &modulus {
            base.check(c)?;
        }
        if !is_irreducible(&base, &modulus) {
            return Err(Error::Reducible { p: base.modulus(), poly: modulus });
        }
        let degree = modulus.len() - 1;
        Ok(ExtField { base, degree, modulus })
    }

    /// The canonical GF(p^k): modulus is the monic irreducible of degree k
    /// whose low-to-high coefficient vector encodes the smallest integer
    /// sum(c_i p^i). GF(9) resolves to t^2+1 and GF(16) to x^4+x+1 under
    /// this order.
    pub fn canonical(p: u64, k: usize) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if k == 0 {
            return Err(Error::InvalidParameter("degree must be >= 1".into()));
        }
        if k == 1 {
            return ExtField::new(base, vec![0, 1]);
        }
        // lower coefficients count upward as a base-p integer
        let total = (p as u128).checked_pow(k as u32).ok_or_else(|| {
            Error::InvalidParameter("field too large for canonical search".into())
        })?;
        let mut idx: u128 = 0;
        while idx < total {
            let mut poly = Vec::with_capacity(k + 1);
            let mut v = idx;
            for _ in 0..k {
                poly.push((v % p as u128) as u64);
                v /= p as u128;
            }
            poly.push(1);
            if is_irreducible(&base, &poly) {
                return ExtField::new(base, poly);
            }
            idx += 1;
        }
        Err(Error::InvalidParameter(format!("no irreducible of degree {k} over F_{p}")))
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of field elements p^k, when it fits a u128.
    pub fn order(&self) -> u128 {
        (self.base.modulus() as u128).pow(self.degree as u32)
    }

    fn check_elem(&self, a: &[u64]) -> Result<()> {
        if a.len() != self.degree {
            return Err(Error::LengthMismatch { expected: self.degree, got: a.len() });
        }
        for &c in a {
            self.base.check(c)?;
        }
        Ok(())
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
        self.check_elem(a)?;
        self.check_elem(b)?;
        Ok(a.iter().zip(b).map(|(&x, &y)| self.base.add(x, y)).collect())
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
        self.check_elem(a)?;
        self.check_elem(b)?;
        let prod = poly_mul(&self.base, a, b);
        let mut r = poly_rem(&self.base, &prod, &self.modulus);
        r.resize(self.degree, 0);
        Ok(r)
    }

    pub fn square(&self, a: &[u64]) -> Result<Vec<u64>> {
        self.mul(a, a)
    }

    /// Element <-> index bijection: index = sum(c_i p^i).
    pub fn elem_to_index(&self, a: &[u64]) -> u128 {
        let p = self.base.modulus() as u128;
        a.iter().rev().fold(0u128, |acc, &c| acc * p + c as u128)
    }

    pub fn index_to_elem(&self, mut idx: u128) -> Vec<u64> {
        let p = self.base.modulus() as u128;
        let mut out = Vec::with_capacity(self.degree);
        for _ in 0..self.degree {
            out.push((idx % p) as u64);
            idx /= p;
        }
        out
    }
}

/// GF(2^m) with word-packed elements and a fixed reduction polynomial.
///
/// The reduction mask includes the leading term bit (x^4+x+1 is 0x13).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gf2m {
    m: usize,
    poly: u64,
}

impl Gf2m {
    pub fn new(m: usize, poly: u64) -> Result<Self> {
        if m == 0 || m > 32 {
            return Err(Error::InvalidParameter(format!("unsupported GF(2^{m})")));
        }
        if poly >> m != 1 {
            return Err(Error::InvalidParameter(format!(
                "reduction polynomial {poly:#x} does not have degree {m}"
            )));
        }
        let f2 = PrimeField::new(2)?;
        let coeffs: Vec<u64> = (0..=m).map(|i| (poly >> i) & 1).collect();
        if !is_irreducible(&f2, &coeffs) {
            return Err(Error::Reducible { p: 2, poly: coeffs });
        }
        Ok(Gf2m { m, poly })
    }

    /// GF(2^m) with the smallest irreducible reduction polynomial by
    /// integer value.
    pub fn canonical(m: usize) -> Result<Self> {
        let ext = ExtField::canonical(2, m)?;
        let mut mask = 0u64;
        for (i, &c) in ext.modulus().iter().enumerate() {
            mask |= c << i;
        }
        Gf2m::new(m, mask)
    }

    pub fn width(&self) -> usize {
        self.m
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    pub fn check(&self, a: u64) -> Result<u64> {
        if a >> self.m == 0 {
            Ok(a)
        } else {
            Err(Error::ElementOutOfRange(a))
        }
    }

    /// Carryless product reduced modulo the field polynomial.
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a >> self.m == 0 && b >> self.m == 0);
        let mut acc: u64 = 0;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if (a >> self.m) & 1 == 1 {
                a ^= self.poly;
            }
        }
        acc
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }
}

/// Serializable descriptor of one of the three field kinds.
///
/// Text forms: `Fp:3`, `GF:3^2:t^2+1`, `GF2:4:0x13`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FieldDesc {
    Fp(u64),
    Ext { p: u64, k: usize, modulus: Vec<u64> },
    Gf2 { m: usize, poly: u64 },
}

impl FieldDesc {
    pub fn from_ext(f: &ExtField) -> Self {
        FieldDesc::Ext { p: f.base().modulus(), k: f.degree(), modulus: f.modulus().to_vec() }
    }
}

fn poly_to_text(modulus: &[u64]) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (i, &c) in modulus.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let term = match (i, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "t".to_string(),
            (1, c) => format!("{c}t"),
            (i, 1) => format!("t^{i}"),
            (i, c) => format!("{c}t^{i}"),
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

fn poly_from_text(s: &str, k: usize) -> Result<Vec<u64>> {
    let mut coeffs = vec![0u64; k + 1];
    for term in s.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        let (coef_str, exp) = if let Some(pos) = term.find('t') {
            let c = &term[..pos];
            let rest = &term[pos + 1..];
            let exp = if rest.is_empty() {
                1usize
            } else {
                rest.strip_prefix('^')
                    .ok_or_else(|| Error::Parse(format!("bad term {term:?}")))?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in {term:?}")))?
            };
            (c, exp)
        } else {
            (term, 0usize)
        };
        let coef: u64 = if coef_str.is_empty() {
            1
        } else {
            coef_str.parse().map_err(|_| Error::Parse(format!("bad coefficient {coef_str:?}")))?
        };
        if exp > k {
            return Err(Error::Parse(format!("exponent {exp} exceeds degree {k}")));
        }
        coeffs[exp] += coef;
    }
    Ok(coeffs)
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDesc::Fp(p) => write!(f, "Fp:{p}"),
            FieldDesc::Ext { p, k, modulus } => {
                write!(f, "GF:{p}^{k}:{}", poly_to_text(modulus))
            }
            FieldDesc::Gf2 { m, poly } => write!(f, "GF2:{m}:{poly:#x}"),
        }
    }
}

impl FromStr for FieldDesc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["Fp", p] => Ok(FieldDesc::Fp(
                p.parse().map_err(|_| Error::Parse(format!("bad modulus {p:?}")))?,
            )),
            ["GF", pk, poly] => {
                let (p, k) = pk
                    .split_once('^')
                    .ok_or_else(|| Error::Parse(format!("bad field order {pk:?}")))?;
                let p: u64 = p.parse().map_err(|_| Error::Parse(format!("bad p {p:?}")))?;
                let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad k {k:?}")))?;
                Ok(FieldDesc::Ext { p, k, modulus: poly_from_text(poly, k)? })
            }
            ["GF2", m, poly] => {
                let m: usize = m.parse().map_err(|_| Error::Parse(format!("bad m {m:?}")))?;
                Ok(FieldDesc::Gf2 { m, poly: crate::bits::parse_u64(poly)? })
            }
            _ => Err(Error::Parse(format!("unrecognized field descriptor {s:?}"))),
        }
    }
}

impl TryFrom<String> for FieldDesc {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FieldDesc> for String {
    fn from(d: FieldDesc) -> String {
        d.to_string()
    }
}

/// A vector of canonical representatives over a declared field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldVec {
    pub field: FieldDesc,
    pub coeffs: Vec<u64>,
}

impl FieldVec {
    pub fn new(field: FieldDesc, coeffs: Vec<u64>) -> Result<Self> {
        let bound = match &field {
            FieldDesc::Fp(p) => *p,
            FieldDesc::Ext { p, .. } => *p,
            FieldDesc::Gf2 { m, .. } => 1u64 << m,
        };
        for &c in &coeffs {
            if c >= bound {
                return Err(Error::ElementOutOfRange(c));
            }
        }
        Ok(FieldVec { field, coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Interprets `bits` (MSB first, `width` bits) as an integer and writes it
/// base p with n digits, most significant digit first. Injective whenever
/// p^n >= 2^width.
pub fn encode_bits(value: u64, width: usize, p: u64, n: usize) -> Result<Vec<u64>> {
    let capacity = (p as u128)
        .checked_pow(n as u32)
        .ok_or(Error::EncodingOverflow { bits: width, p, n })?;
    if width > 64 || (1u128 << width) > capacity {
        return Err(Error::EncodingOverflow { bits: width, p, n });
    }
    if width < 64 && value >> width != 0 {
        return Err(Error::ElementOutOfRange(value));
    }
    let mut v = value as u128;
    let mut digits = vec![0u64; n];
    for i in (0..n).rev() {
        digits[i] = (v % p as u128) as u64;
        v /= p as u128;
    }
    debug_assert_eq!(v, 0);
    Ok(digits)
}

/// Inverse of [`encode_bits`] on its image.
pub fn decode_bits(digits: &[u64], p: u64, width: usize) -> Result<u64> {
    let mut v: u128 = 0;
    for &d in digits {
        if d >= p {
            return Err(Error::ElementOutOfRange(d));
        }
        v = v * p as u128 + d as u128;
    }
    if width < 64 && v >> width != 0 {
        return Err(Error::EncodingOverflow { bits: width, p, n: digits.len() });
    }
    Ok(v as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_basics() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(!is_prime(1));
        assert!(!is_prime(16777217)); // 2^24 + 1 = 97 * 257 * 673
        assert!(is_prime(65537));
        assert_eq!(next_prime(16777216) > 16777216, true);
        assert!(is_prime(next_prime(1u64 << 40)));
    }

    #[test]
    fn fp_arith_examples() {
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(f3.mul(2, 2), 1); // 4 mod 3
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.inv(2).unwrap(), 3); // 2*3 = 6 = 1
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.pow(2, 0), 1);
        assert!(f3.inv(0).is_err());
    }

    #[test]
    fn not_prime_rejected() {
        assert!(matches!(PrimeField::new(9), Err(Error::NotPrime(9))));
    }

    /// Schoolbook oracle: multiply coefficient vectors, reduce by t^2+1, mod 3.
    fn gf9_oracle_mul(a: [u64; 2], b: [u64; 2]) -> [u64; 2] {
        let mut raw = [0u64; 3];
        for i in 0..2 {
            for j in 0..2 {
                raw[i + j] = (raw[i + j] + a[i] * b[j]) % 3;
            }
        }
        // t^2 = -1
        let c0 = (raw[0] + 2 * raw[2]) % 3;
        [c0, raw[1]]
    }

    #[test]
    fn gf9_square_matches_schoolbook_oracle() {
        let gf9 = ExtField::canonical(3, 2).unwrap();
        assert_eq!(gf9.modulus(), &[1, 0, 1]); // t^2 + 1
        let sq = gf9.square(&[1, 2]).unwrap();
        assert_eq!(sq, vec![0, 1]);
        assert_eq!(gf9_oracle_mul([1, 2], [1, 2]), [0, 1]);
        for ai in 0..9u128 {
            for bi in 0..9u128 {
                let a = gf9.index_to_elem(ai);
                let b = gf9.index_to_elem(bi);
                let got = gf9.mul(&a, &b).unwrap();
                let want = gf9_oracle_mul([a[0], a[1]], [b[0], b[1]]);
                assert_eq!(got, want.to_vec());
            }
        }
    }

    #[test]
    fn ext_identity_and_additive_inverse() {
        let gf9 = ExtField::canonical(3, 2).unwrap();
        let one = vec![1, 0];
        for i in 0..9u128 {
            let a = gf9.index_to_elem(i);
            assert_eq!(gf9.mul(&a, &one).unwrap(), a);
        }
        assert_eq!(gf9.add(&[1, 2], &[2, 1]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn ext_square_equals_mul_exhaustive() {
        for (p, k) in [(3u64, 2usize), (5, 2)] {
            let f = ExtField::canonical(p, k).unwrap();
            for i in 0..f.order() {
                let a = f.index_to_elem(i);
                assert_eq!(f.square(&a).unwrap(), f.mul(&a, &a).unwrap());
            }
        }
    }

    #[test]
    fn ext_length_mismatch_errors() {
        let gf9 = ExtField::canonical(3, 2).unwrap();
        assert!(gf9.mul(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn reducible_modulus_rejected() {
        let f3 = PrimeField::new(3).unwrap();
        // t^2 - 1 = (t-1)(t+1)
        assert!(ExtField::new(f3, vec![2, 0, 1]).is_err());
    }

    /// Log/antilog oracle for GF(16) with x^4+x+1 and generator x.
    fn gf16_tables() -> ([u64; 16], [u64; 15]) {
        let mut log = [0u64; 16];
        let mut antilog = [0u64; 15];
        let mut v: u64 = 1;
        for e in 0..15 {
            antilog[e] = v;
            log[v as usize] = e as u64;
            v <<= 1;
            if v & 0x10 != 0 {
                v ^= 0x13;
            }
        }
        (log, antilog)
    }

    #[test]
    fn gf16_mul_matches_log_table_oracle() {
        let (log, antilog) = gf16_tables();
        let f = Gf2m::new(4, 0x13).unwrap();
        assert_eq!(f.mul(0x3, 0x7), 0x9);
        assert_eq!(antilog[((log[3] + log[7]) % 15) as usize], 0x9);
        for a in 0..16u64 {
            for b in 0..16u64 {
                let want = if a == 0 || b == 0 {
                    0
                } else {
                    antilog[((log[a as usize] + log[b as usize]) % 15) as usize]
                };
                assert_eq!(f.mul(a, b), want, "a={a:#x} b={b:#x}");
            }
        }
        // identity and zero
        for a in 0..16u64 {
            assert_eq!(f.mul(a, 0x1), a);
            assert_eq!(f.mul(a, 0x0), 0);
        }
    }

    #[test]
    fn gf2m_reducible_poly_rejected() {
        // x^4 + 1 = (x+1)^4 over F_2
        assert!(Gf2m::new(4, 0x11).is_err());
    }

    #[test]
    fn canonical_gf2_4_is_x4_x_1() {
        assert_eq!(Gf2m::canonical(4).unwrap().poly(), 0x13);
    }

    #[test]
    fn field_axioms_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let fp = PrimeField::new(1000003).unwrap();
        for _ in 0..200 {
            let a = rng.gen_range(0..1000003);
            let b = rng.gen_range(0..1000003);
            let c = rng.gen_range(0..1000003);
            assert_eq!(fp.mul(fp.mul(a, b), c), fp.mul(a, fp.mul(b, c)));
            assert_eq!(fp.mul(a, fp.add(b, c)), fp.add(fp.mul(a, b), fp.mul(a, c)));
            if a != 0 {
                assert_eq!(fp.mul(a, fp.inv(a).unwrap()), 1);
            }
        }
        let gf = Gf2m::canonical(8).unwrap();
        for _ in 0..200 {
            let a = rng.gen_range(0..256);
            let b = rng.gen_range(0..256);
            let c = rng.gen_range(0..256);
            assert_eq!(gf.mul(gf.mul(a, b), c), gf.mul(a, gf.mul(b, c)));
            assert_eq!(gf.mul(a, gf.add(b, c)), gf.add(gf.mul(a, b), gf.mul(a, c)));
        }
        let gf25 = ExtField::canonical(5, 2).unwrap();
        for _ in 0..200 {
            let a = gf25.index_to_elem(rng.gen_range(0..25));
            let b = gf25.index_to_elem(rng.gen_range(0..25));
            let c = gf25.index_to_elem(rng.gen_range(0..25));
            let ab_c = gf25.mul(&gf25.mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = gf25.mul(&a, &gf25.mul(&b, &c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
            let lhs = gf25.mul(&a, &gf25.add(&b, &c).unwrap()).unwrap();
            let rhs = gf25
                .add(&gf25.mul(&a, &b).unwrap(), &gf25.mul(&a, &c).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_bits(0b1010, 4, 3, 3).unwrap(), vec![1, 0, 1]);
        assert_eq!(encode_bits(0, 4, 5, 2).unwrap(), vec![0, 0]);
        assert!(encode_bits(0, 4, 3, 1).is_err()); // 16 > 3
    }

    #[test]
    fn encode_round_trip_exhaustive() {
        for v in 0..16u64 {
            let d = encode_bits(v, 4, 3, 3).unwrap();
            assert_eq!(decode_bits(&d, 3, 4).unwrap(), v);
        }
        // injectivity at width 12
        let mut seen = std::collections::HashSet::new();
        for v in 0..(1u64 << 12) {
            let d = encode_bits(v, 12, 3, 8).unwrap();
            assert!(seen.insert(d));
        }
    }

    #[test]
    fn field_desc_text_round_trip() {
        for text in ["Fp:3", "GF:3^2:t^2+1", "GF2:4:0x13"] {
            let d: FieldDesc = text.parse().unwrap();
            assert_eq!(d.to_string(), text);
        }
        let gf9 = ExtField::canonical(3, 2).unwrap();
        let desc = FieldDesc::from_ext(&gf9);
        assert_eq!(desc.to_string(), "GF:3^2:t^2+1");
    }
}
