//! Extractor constructions: the generalized inner product IP_p^n, generic
//! two-wise independent families, the inner-product non-malleable extractor
//! over GF(p^(n/2)), and a desk-scale Trevisan-style seeded extractor built
//! from a Nisan-Wigderson polynomial weak design.

use serde::{Deserialize, Serialize};

use crate::bits::{bit, mask, parity};
use crate::error::{Error, Result};
use crate::ff::{is_prime, ExtField, FieldDesc, PrimeField};

/// Inner product sum x_i y_i mod p.
pub fn ip_ext(field: &PrimeField, x: &[u64], y: &[u64]) -> Result<u64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    let mut acc = 0u64;
    for (&a, &b) in x.iter().zip(y) {
        field.check(a)?;
        field.check(b)?;
        acc = field.add(acc, field.mul(a, b));
    }
    Ok(acc)
}

/// Index <-> vector bijection for F_p^n, most significant digit first
/// (matches the bitstring encoding convention).
pub fn index_to_vec(idx: u64, p: u64, n: usize) -> Vec<u64> {
    let mut v = vec![0u64; n];
    let mut rem = idx;
    for i in (0..n).rev() {
        v[i] = rem % p;
        rem /= p;
    }
    v
}

pub fn vec_to_index(v: &[u64], p: u64) -> u64 {
    v.iter().fold(0u64, |acc, &d| acc * p + d)
}

/// A two-wise independent function f: X x Y -> Z given by an evaluation
/// rule. For any distinct x1, x2 the number of y with f(x1,y) = f(x2,y) is
/// exactly |Y|/|Z|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum TwoWiseSpec {
    /// IP_p^n on F_p^n x F_p^n -> F_p.
    Ip { p: u64, n: usize },
    /// The affine family h_(a,b)(x) = a x + b over F_p; the seed is the
    /// pair (a, b).
    Affine { p: u64 },
    /// Explicit table, row-major over (x, y).
    Table { x_card: u64, y_card: u64, z_card: u64, table: Vec<u64> },
}

impl TwoWiseSpec {
    pub fn ip(p: u64, n: usize) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let _ = field;
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        (p as u128)
            .checked_pow(n as u32)
            .filter(|&c| c <= u64::MAX as u128)
            .ok_or_else(|| Error::InvalidParameter("p^n exceeds u64".into()))?;
        Ok(TwoWiseSpec::Ip { p, n })
    }

    pub fn x_card(&self) -> u64 {
        match self {
            TwoWiseSpec::Ip { p, n } => p.pow(*n as u32),
            TwoWiseSpec::Affine { p } => *p,
            TwoWiseSpec::Table { x_card, .. } => *x_card,
        }
    }

    pub fn y_card(&self) -> u64 {
        match self {
            TwoWiseSpec::Ip { p, n } => p.pow(*n as u32),
            TwoWiseSpec::Affine { p } => p * p,
            TwoWiseSpec::Table { y_card, .. } => *y_card,
        }
    }

    pub fn z_card(&self) -> u64 {
        match self {
            TwoWiseSpec::Ip { p, .. } => *p,
            TwoWiseSpec::Affine { p } => *p,
            TwoWiseSpec::Table { z_card, .. } => *z_card,
        }
    }

    /// Evaluation on domain indices.
    pub fn eval_index(&self, ix: u64, iy: u64) -> Result<u64> {
        if ix >= self.x_card() || iy >= self.y_card() {
            return Err(Error::ElementOutOfRange(ix.max(iy)));
        }
        match self {
            TwoWiseSpec::Ip { p, n } => {
                let field = PrimeField::new(*p)?;
                let x = index_to_vec(ix, *p, *n);
                let y = index_to_vec(iy, *p, *n);
                ip_ext(&field, &x, &y)
            }
            TwoWiseSpec::Affine { p } => {
                let field = PrimeField::new(*p)?;
                let a = iy / p;
                let b = iy % p;
                Ok(field.add(field.mul(a, ix), b))
            }
            TwoWiseSpec::Table { y_card, table, .. } => {
                Ok(table[(ix * y_card + iy) as usize])
            }
        }
    }

    /// Exhaustive two-wise independence check: every distinct pair of x's
    /// collides on exactly |Y|/|Z| seeds.
    pub fn verify_twowise(&self) -> Result<()> {
        let (nx, ny, nz) = (self.x_card(), self.y_card(), self.z_card());
        if (nx as u128) * (ny as u128) > 1 << 20 {
            return Err(Error::DomainTooLarge {
                size: nx as u128 * ny as u128,
                limit: 1 << 20,
            });
        }
        if ny % nz != 0 {
            return Err(Error::InvalidParameter("|Y| not divisible by |Z|".into()));
        }
        let want = ny / nz;
        for x1 in 0..nx {
            for x2 in (x1 + 1)..nx {
                let mut collisions = 0u64;
                for y in 0..ny {
                    if self.eval_index(x1, y)? == self.eval_index(x2, y)? {
                        collisions += 1;
                    }
                }
                if collisions != want {
                    return Err(Error::InvalidParameter(format!(
                        "not two-wise independent: x1={x1} x2={x2} collide on {collisions} seeds, expected {want}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Parameters of the non-malleable extractor nmExt(x, y) = <x, y || y^2>
/// with x in F_p^n and y in GF(p^(n/2)); squaring is in the extension
/// field, with the canonical irreducible modulus fixed per (p, n/2).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmExtParams {
    pub p: u64,
    pub n: usize,
    pub ext: FieldDesc,
    #[serde(skip)]
    ext_field: Option<ExtField>,
}

impl PartialEq for NmExtParams {
    fn eq(&self, other: &Self) -> bool {
        (self.p, self.n, &self.ext) == (other.p, other.n, &other.ext)
    }
}

impl NmExtParams {
    pub fn new(p: u64, n: usize) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidParameter("p must be an odd prime".into()));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidParameter("n must be a positive even integer".into()));
        }
        let ext = ExtField::canonical(p, n / 2)?;
        Ok(NmExtParams { p, n, ext: FieldDesc::from_ext(&ext), ext_field: Some(ext) })
    }

    pub fn ext_field(&self) -> Result<ExtField> {
        if let Some(f) = &self.ext_field {
            return Ok(f.clone());
        }
        match &self.ext {
            FieldDesc::Ext { p, modulus, .. } => {
                ExtField::new(PrimeField::new(*p)?, modulus.clone())
            }
            _ => Err(Error::InvalidParameter("nmExt requires an extension field".into())),
        }
    }

    /// y concatenated with its field square, as an F_p^n vector
    /// (coefficients low-order first within each half).
    pub fn pair_vector(&self, y: &[u64]) -> Result<Vec<u64>> {
        let ext = self.ext_field()?;
        let y2 = ext.square(y)?;
        let mut v = Vec::with_capacity(self.n);
        v.extend_from_slice(y);
        v.extend_from_slice(&y2);
        Ok(v)
    }

    pub fn y_card(&self) -> u64 {
        self.p.pow((self.n / 2) as u32)
    }

    pub fn x_card(&self) -> u64 {
        self.p.pow(self.n as u32)
    }
}

/// nmExt(x, y) = <x, y || y^2> in F_p.
pub fn nm_ext(params: &NmExtParams, x: &[u64], y: &[u64]) -> Result<u64> {
    if x.len() != params.n {
        return Err(Error::LengthMismatch { expected: params.n, got: x.len() });
    }
    let field = PrimeField::new(params.p)?;
    let v = params.pair_vector(y)?;
    ip_ext(&field, x, &v)
}

/// Index form: x over p^n (digits MSB first), y over p^(n/2) (extension
/// field element index, low coefficient = least significant digit).
pub fn nm_ext_index(params: &NmExtParams, ix: u64, iy: u64) -> Result<u64> {
    let x = index_to_vec(ix, params.p, params.n);
    let ext = params.ext_field()?;
    let y = ext.index_to_elem(iy as u128);
    nm_ext(params, &x, &y)
}

/// Truncation of a field element to its low `width` bits. With p >
/// 2^(width+8) the per-point probability deviation from uniform is at most
/// 1/p <= 2^-8 * 2^-width.
#[inline]
pub fn truncate(elem: u64, width: usize) -> u64 {
    mask(elem, width)
}

/// Exact statistical distance of truncate(uniform F_p) from uniform width-bit
/// strings: r (2^w - r) / (p 2^w) with r = p mod 2^w.
pub fn truncation_bias(p: u64, width: usize) -> f64 {
    let m = 1u128 << width;
    let r = (p as u128) % m;
    (r * (m - r)) as f64 / (p as u128 * m) as f64
}

// ---------------------------------------------------------------------------
// Nisan-Wigderson polynomial weak design + Trevisan-style extractor.
// ---------------------------------------------------------------------------

fn prime_power_split(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut v = q;
            let mut e = 0u32;
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            return (v == 1).then_some((p, e));
        }
        p += 1;
    }
    Some((q, 1))
}

enum GfQ {
    Prime(PrimeField),
    Ext(ExtField),
}

impl GfQ {
    fn new(q: u64) -> Result<Self> {
        let (p, e) = prime_power_split(q)
            .ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
        if e == 1 {
            Ok(GfQ::Prime(PrimeField::new(p)?))
        } else {
            Ok(GfQ::Ext(ExtField::canonical(p, e as usize)?))
        }
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        match self {
            GfQ::Prime(f) => f.add(a, b),
            GfQ::Ext(f) => {
                let r = f
                    .add(&f.index_to_elem(a as u128), &f.index_to_elem(b as u128))
                    .expect("index elements are valid");
                f.elem_to_index(&r) as u64
            }
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        match self {
            GfQ::Prime(f) => f.mul(a, b),
            GfQ::Ext(f) => {
                let r = f
                    .mul(&f.index_to_elem(a as u128), &f.index_to_elem(b as u128))
                    .expect("index elements are valid");
                f.elem_to_index(&r) as u64
            }
        }
    }
}

/// Parameters of the Trevisan-style extractor. `sets` is the weak design
/// over [d]; each set has exactly `t` elements. The construction checks the
/// declared overlap bound sum_(j<i) 2^|S_i n S_j| <= rho_bar (i-1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrevisanParams {
    /// Input length in bits.
    pub n: usize,
    /// Seed bits per one-bit extraction (= set size).
    pub t: usize,
    /// Output bits.
    pub l: usize,
    /// Total seed bits (q^2 for field size q).
    pub d: usize,
    /// Declared overlap parameter.
    pub rho_bar: f64,
    /// Design sets, each sorted ascending.
    pub sets: Vec<Vec<usize>>,
}

/// Builds the polynomial weak design: q = smallest prime power >= t,
/// d = q^2, S_i = graph of the i-th polynomial of degree < c over F_q where
/// c is minimal with q^c >= l.
pub fn build_weak_design(l: usize, t: usize) -> Result<TrevisanParams> {
    if l == 0 || t == 0 {
        return Err(Error::InvalidParameter("l and t must be >= 1".into()));
    }
    let mut q = t as u64;
    while prime_power_split(q).is_none() {
        q += 1;
    }
    let d = (q * q) as usize;
    if d > 64 {
        return Err(Error::InvalidParameter(format!(
            "seed length d = {d} exceeds the 64-bit desk-scale cap"
        )));
    }
    // minimal degree bound c with q^c >= l
    let mut c = 0usize;
    let mut cap = 1u128;
    while cap < l as u128 {
        cap *= q as u128;
        c += 1;
    }
    if c > q as usize {
        return Err(Error::InvalidParameter(format!(
            "infeasible parameters: need degree {c} polynomials over F_{q}"
        )));
    }
    let gf = GfQ::new(q)?;
    let mut sets = Vec::with_capacity(l);
    for i in 0..l as u64 {
        // coefficients of the i-th polynomial: base-q digits of i, low first
        let mut coeffs = Vec::with_capacity(c.max(1));
        let mut v = i;
        for _ in 0..c.max(1) {
            coeffs.push(v % q);
            v /= q;
        }
        let mut set = Vec::with_capacity(q as usize);
        for a in 0..q {
            // Horner evaluation of the polynomial at point a
            let mut val = 0u64;
            for &co in coeffs.iter().rev() {
                val = gf.add(gf.mul(val, a), co);
            }
            set.push((a * q + val) as usize);
        }
        set.sort_unstable();
        sets.push(set);
    }
    let rho_bar = 2f64.powi(c.saturating_sub(1) as i32);
    let params = TrevisanParams { n: 0, t: q as usize, l, d, rho_bar, sets };
    check_design(&params)?;
    Ok(params)
}

fn check_design(p: &TrevisanParams) -> Result<()> {
    for s in &p.sets {
        if s.len() != p.t {
            return Err(Error::InvalidParameter("design set size mismatch".into()));
        }
        if s.iter().any(|&i| i >= p.d) {
            return Err(Error::InvalidParameter("design index out of range".into()));
        }
    }
    for i in 1..p.sets.len() {
        let mut sum = 0f64;
        for j in 0..i {
            let overlap =
                p.sets[i].iter().filter(|x| p.sets[j].binary_search(x).is_ok()).count();
            sum += 2f64.powi(overlap as i32);
        }
        if sum > p.rho_bar * i as f64 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "overlap bound violated at set {i}: {sum} > {} * {i}",
                p.rho_bar
            )));
        }
    }
    Ok(())
}

impl TrevisanParams {
    /// Weak design for `l` output bits and sub-seed size `t`, attached to an
    /// `n`-bit input.
    pub fn new(n: usize, l: usize, t: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidParameter("input length must be 1..=64 bits".into()));
        }
        let mut params = build_weak_design(l, t)?;
        params.n = n;
        Ok(params)
    }

    /// Re-checks the structural invariants (set sizes, index range, the
    /// declared overlap bound); deserialized parameter records go through
    /// this before use.
    pub fn validate(&self) -> Result<()> {
        if self.sets.len() != self.l {
            return Err(Error::InvalidParameter("design must have l sets".into()));
        }
        check_design(self)
    }
}

/// Linear input encoding: folds n bits onto t bits by XOR-ing input bit i
/// into output bit i mod t. Surjective for n >= t, identity for n = t.
pub fn fold_encode(x: u64, n: usize, t: usize) -> u64 {
    let mut out = 0u64;
    for i in 0..n {
        out ^= bit(x, i) << (i % t);
    }
    out
}

/// One-bit core: inner product mod 2 of the encoded input with a t-bit
/// sub-seed.
pub fn one_bit_core(enc: u64, sub_seed: u64) -> u64 {
    parity(enc & sub_seed)
}

/// Trevisan-style extraction: bit i is <enc(x), seed restricted to S_i>.
/// Output bit i sits at position i (LSB order).
pub fn trevisan_ext(x: u64, seed: u64, params: &TrevisanParams) -> Result<u64> {
    if params.n == 0 {
        return Err(Error::InvalidParameter("params carry no input length".into()));
    }
    if params.n < 64 && x >> params.n != 0 {
        return Err(Error::ElementOutOfRange(x));
    }
    if params.d < 64 && seed >> params.d != 0 {
        return Err(Error::ElementOutOfRange(seed));
    }
    let enc = fold_encode(x, params.n, params.t);
    let mut out = 0u64;
    for (i, set) in params.sets.iter().enumerate() {
        let mut sub = 0u64;
        for (j, &pos) in set.iter().enumerate() {
            sub |= bit(seed, pos) << j;
        }
        out |= one_bit_core(enc, sub) << i;
    }
    Ok(out)
}

/// Exact strong-extractor error of `params` on a uniform input: the average
/// over all 2^d seeds of Delta(Tre(U, s), U_l) = 1 - 2^(rank - l), where
/// rank is the GF(2) rank of the l sub-seed rows acting on the folded
/// input. Exhaustive; requires d <= 24 or so.
pub fn exact_uniform_error(params: &TrevisanParams) -> Result<f64> {
    if params.d > 24 {
        return Err(Error::Regime(format!("2^{} seeds is beyond exhaustive range", params.d)));
    }
    if params.n < params.t {
        // the closed form below needs fold(U_n) uniform on t bits
        return Err(Error::Regime("input shorter than the fold width".into()));
    }
    let total = 1u64 << params.d;
    let mut acc = 0f64;
    for seed in 0..total {
        let mut rows = Vec::with_capacity(params.l);
        for set in &params.sets {
            let mut sub = 0u64;
            for (j, &pos) in set.iter().enumerate() {
                sub |= bit(seed, pos) << j;
            }
            rows.push(sub);
        }
        let r = gf2_rank(&mut rows);
        acc += 1.0 - 2f64.powi(r as i32 - params.l as i32);
    }
    Ok(acc / total as f64)
}

/// Rank over GF(2) of bit-vector rows.
pub fn gf2_rank(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for col in (0..64).rev() {
        let Some(pivot) = (rank..rows.len()).find(|&r| bit(rows[r], col) == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && bit(rows[r], col) == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}
