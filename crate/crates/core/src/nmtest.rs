//! Exhaustive brute-force testers: exact two-source extractor error, exact
//! non-malleability error against every no-fixed-point tampering table, and
//! exact MAC forgery probability.
//!
//! Everything here enumerates joint laws outright; distances come out as
//! exact rationals and are compared against the instantiated theorem bounds.

use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::dist::{Dist, WeakSourceSpec};
use crate::error::{Error, Result};
use crate::ff::Gf2m;
use crate::mac::{mac_tag, MacKey};
use crate::scalar::ProbScalar;
use crate::xtr::{nm_ext_index, NmExtParams, TwoWiseSpec};

/// Which register the extractor error is measured jointly with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strong {
    None,
    X,
    Y,
}

const EXHAUSTIVE_LIMIT: u128 = 1 << 24;

/// Exact extractor error of a two-wise spec on explicit sources.
///
/// Y-strong: Delta((Z, Y), U_Z x P_Y); X-strong symmetric; none: Delta(Z, U_Z).
pub fn test_two_source<T: ProbScalar>(
    ext: &TwoWiseSpec,
    src_x: &WeakSourceSpec,
    src_y: &WeakSourceSpec,
    strong: Strong,
) -> Result<T> {
    if src_x.domain != ext.x_card() || src_y.domain != ext.y_card() {
        return Err(Error::InvalidParameter(format!(
            "source domains ({}, {}) do not match the extractor ({}, {})",
            src_x.domain,
            src_y.domain,
            ext.x_card(),
            ext.y_card()
        )));
    }
    let size = src_x.support_size() as u128 * src_y.support_size() as u128;
    if size > EXHAUSTIVE_LIMIT {
        return Err(Error::DomainTooLarge { size, limit: EXHAUSTIVE_LIMIT });
    }
    let px: Dist<T> = src_x.dist();
    let py: Dist<T> = src_y.dist();
    let nz = ext.z_card();
    let uz = T::from_ratio(1, nz);
    let half = T::from_ratio(2, 1);

    match strong {
        Strong::None => {
            let mut law = vec![T::zero(); nz as usize];
            for (&x, wx) in px.support().iter().zip(px.probs()) {
                for (&y, wy) in py.support().iter().zip(py.probs()) {
                    let z = ext.eval_index(x, y)? as usize;
                    law[z] = law[z].add(&wx.mul(wy));
                }
            }
            let mut acc = T::zero();
            for z in &law {
                acc = acc.add(&z.abs_diff(&uz));
            }
            Ok(acc.div(&half))
        }
        Strong::Y => strong_side(ext, &py, &px, nz, &uz, &half, |ext, y, x| ext.eval_index(x, y)),
        Strong::X => strong_side(ext, &px, &py, nz, &uz, &half, |ext, x, y| ext.eval_index(x, y)),
    }
}

/// Shared body for the strong cases: outer register W, inner register V,
/// error = sum_w P(w) * Delta(Z | w, U_Z).
fn strong_side<T: ProbScalar>(
    ext: &TwoWiseSpec,
    outer: &Dist<T>,
    inner: &Dist<T>,
    nz: u64,
    uz: &T,
    half: &T,
    eval: impl Fn(&TwoWiseSpec, u64, u64) -> Result<u64>,
) -> Result<T> {
    let mut acc = T::zero();
    for (&w, pw) in outer.support().iter().zip(outer.probs()) {
        let mut slice = vec![T::zero(); nz as usize];
        for (&v, pv) in inner.support().iter().zip(inner.probs()) {
            let z = eval(ext, w, v)? as usize;
            slice[z] = slice[z].add(pv);
        }
        let mut d = T::zero();
        for z in &slice {
            d = d.add(&z.abs_diff(uz));
        }
        acc = acc.add(&pw.mul(&d.div(half)));
    }
    Ok(acc)
}

/// Second, independent enumeration path for the same quantity: accumulates
/// the full joint law with the loop order swapped, then takes the distance
/// on the whole table. Tests require agreement with `test_two_source` to
/// 1e-12.
pub fn test_two_source_slow(
    ext: &TwoWiseSpec,
    src_x: &WeakSourceSpec,
    src_y: &WeakSourceSpec,
    strong: Strong,
) -> Result<f64> {
    let px: Dist<f64> = src_x.dist();
    let py: Dist<f64> = src_y.dist();
    let nz = ext.z_card() as usize;
    match strong {
        Strong::None => {
            let mut law = vec![0f64; nz];
            for (&y, wy) in py.support().iter().zip(py.probs()) {
                for (&x, wx) in px.support().iter().zip(px.probs()) {
                    law[ext.eval_index(x, y)? as usize] += wx * wy;
                }
            }
            Ok(law.iter().map(|p| (p - 1.0 / nz as f64).abs()).sum::<f64>() / 2.0)
        }
        Strong::Y | Strong::X => {
            // joint over (z, w) where w is the strong register
            let (outer, inner): (&Dist<f64>, &Dist<f64>) = match strong {
                Strong::Y => (&py, &px),
                _ => (&px, &py),
            };
            let mut joint = vec![0f64; nz * outer.len()];
            for (vi, (&v, pv)) in inner.support().iter().zip(inner.probs()).enumerate() {
                let _ = vi;
                for (wi, (&w, pw)) in outer.support().iter().zip(outer.probs()).enumerate() {
                    let z = match strong {
                        Strong::Y => ext.eval_index(v, w)?,
                        _ => ext.eval_index(w, v)?,
                    } as usize;
                    joint[z * outer.len() + wi] += pv * pw;
                }
            }
            let mut acc = 0f64;
            for (wi, pw) in outer.probs().iter().enumerate() {
                for z in 0..nz {
                    acc += (joint[z * outer.len() + wi] - pw / nz as f64).abs();
                }
            }
            Ok(acc / 2.0)
        }
    }
}

/// A deterministic tampering table y -> y' with no fixed points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamperStrategy {
    pub table: Vec<u64>,
}

impl TamperStrategy {
    pub fn new(table: Vec<u64>) -> Result<Self> {
        let q = table.len() as u64;
        for (y, &yp) in table.iter().enumerate() {
            if yp >= q {
                return Err(Error::ElementOutOfRange(yp));
            }
            if yp == y as u64 {
                return Err(Error::FixedPoint(y as u64));
            }
        }
        Ok(TamperStrategy { table })
    }

    pub fn apply(&self, y: u64) -> u64 {
        self.table[y as usize]
    }
}

/// Iterator over all (q-1)^q no-fixed-point tables in lexicographic order
/// of the table vector.
pub struct TamperEnum {
    q: u64,
    // counter digit per position, each in 0..q-1; digit d at position y maps
    // to d if d < y else d+1, skipping the fixed point
    digits: Vec<u64>,
    done: bool,
}

pub fn enum_tamper(q: u64) -> Result<TamperEnum> {
    if q < 2 {
        return Err(Error::InvalidParameter("tampering needs a domain of size >= 2".into()));
    }
    Ok(TamperEnum { q, digits: vec![0; q as usize], done: false })
}

impl TamperEnum {
    /// (q-1)^q, the number of tables this iterator will yield.
    pub fn total(&self) -> u128 {
        (self.q as u128 - 1).pow(self.q as u32)
    }
}

impl Iterator for TamperEnum {
    type Item = TamperStrategy;

    fn next(&mut self) -> Option<TamperStrategy> {
        if self.done {
            return None;
        }
        let table: Vec<u64> = self
            .digits
            .iter()
            .enumerate()
            .map(|(y, &d)| if d < y as u64 { d } else { d + 1 })
            .collect();
        // advance the mixed-radix counter
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.q - 1 {
                break;
            }
            self.digits[i] = 0;
        }
        Some(TamperStrategy { table })
    }
}

/// Result of a non-malleability sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmErrorReport {
    pub p: u64,
    pub n: usize,
    /// H_min(X) of the X source; stands in for the k' of the theorem bound
    /// (trivial side information).
    pub k_prime: f64,
    /// H_min(Y) of the Y source.
    pub k: f64,
    /// Exact maximum error over the swept tampering tables.
    pub measured: f64,
    /// Instantiated theorem bound 2^((k'+k-(n+5)log2 p + 1)/4), or None when
    /// the bound exceeds 1 and carries no information.
    pub bound: Option<f64>,
    pub in_force: bool,
    /// Lexicographically first maximizing table.
    pub worst_table: Vec<u64>,
    /// Number of tables swept.
    pub tables: u64,
    pub exhaustive: bool,
}

impl NmErrorReport {
    pub fn csv_header() -> &'static str {
        "p,n,k_prime,k,measured,bound,in_force,tables,exhaustive"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.12},{},{},{},{}",
            self.p,
            self.n,
            self.k_prime,
            self.k,
            self.measured,
            self.bound.map_or_else(|| "not-in-force".into(), |b| format!("{b:.12}")),
            self.in_force,
            self.tables,
            self.exhaustive
        )
    }
}

/// The instantiated non-malleability bound from the extractor's security
/// statement: epsilon = 2^((k' + k - (n+5) log2 p + 1) / 4).
pub fn nm_theorem_bound(p: u64, n: usize, k_prime: f64, k: f64) -> f64 {
    2f64.powf((k_prime + k - (n as f64 + 5.0) * (p as f64).log2() + 1.0) / 4.0)
}

/// Exact non-malleability error for one tampering table:
/// Delta((Z, Z', Y, Y'), U_p x (Z', Y, Y')) where Z = nmExt(X, Y),
/// Z' = nmExt(X, Y'), Y' = table(Y). Enumerates the full joint law.
pub fn nm_error_for_table(
    params: &NmExtParams,
    src_x: &WeakSourceSpec,
    src_y: &WeakSourceSpec,
    strategy: &TamperStrategy,
) -> Result<BigRational> {
    let p = params.p;
    let px: Dist<BigRational> = src_x.dist();
    let py: Dist<BigRational> = src_y.dist();
    let y_card = params.y_card() as usize;
    if strategy.table.len() != y_card {
        return Err(Error::LengthMismatch { expected: y_card, got: strategy.table.len() });
    }
    // joint[(z, z', y)] ; y' = table[y] is determined by y
    let cells = (p * p) as usize * y_card;
    let mut joint = vec![BigRational::zero(); cells];
    for (&ix, wx) in px.support().iter().zip(px.probs()) {
        for (&iy, wy) in py.support().iter().zip(py.probs()) {
            let iy2 = strategy.apply(iy);
            let z = nm_ext_index(params, ix, iy)?;
            let z2 = nm_ext_index(params, ix, iy2)?;
            let cell = ((z * p + z2) as usize) * y_card + iy as usize;
            joint[cell] = joint[cell].add(&wx.mul(wy));
        }
    }
    // marginal over (z', y)
    let mut marg = vec![BigRational::zero(); p as usize * y_card];
    for z in 0..p {
        for z2 in 0..p {
            for y in 0..y_card {
                let cell = ((z * p + z2) as usize) * y_card + y;
                let m = (z2 as usize) * y_card + y;
                marg[m] = marg[m].add(&joint[cell]);
            }
        }
    }
    let up = BigRational::from_ratio(1, p);
    let mut acc = BigRational::zero();
    for z in 0..p {
        for z2 in 0..p {
            for y in 0..y_card {
                let cell = ((z * p + z2) as usize) * y_card + y;
                let reference = up.mul(&marg[(z2 as usize) * y_card + y]);
                acc = acc.add(&joint[cell].abs_diff(&reference));
            }
        }
    }
    Ok(acc.div(&BigRational::from_ratio(2, 1)))
}

/// Strategy sweep mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    All,
    Sampled { count: u64, seed: u64 },
}

/// Sweeps tampering strategies and reports the exact worst-case error next
/// to the instantiated theorem bound (k' = H_min(X), trivial side
/// information).
pub fn test_nm(
    params: &NmExtParams,
    src_x: &WeakSourceSpec,
    src_y: &WeakSourceSpec,
    mode: SweepMode,
) -> Result<NmErrorReport> {
    let q = params.y_card();
    if src_y.domain != q || src_x.domain != params.x_card() {
        return Err(Error::InvalidParameter(
            "source domains do not match the extractor parameters".into(),
        ));
    }
    let joint_size = src_x.support_size() as u128 * q as u128;
    if joint_size > EXHAUSTIVE_LIMIT {
        return Err(Error::DomainTooLarge { size: joint_size, limit: EXHAUSTIVE_LIMIT });
    }
    let mut best = BigRational::zero();
    let mut worst_table: Vec<u64> = Vec::new();
    let mut tables = 0u64;
    let exhaustive = matches!(mode, SweepMode::All);
    match mode {
        SweepMode::All => {
            let en = enum_tamper(q)?;
            if en.total() > 1 << 20 {
                return Err(Error::Regime(format!(
                    "{} tampering tables exceed the exhaustive regime; use sampled mode",
                    en.total()
                )));
            }
            for strategy in en {
                let eps = nm_error_for_table(params, src_x, src_y, &strategy)?;
                tables += 1;
                if eps > best {
                    best = eps;
                    worst_table = strategy.table;
                }
            }
        }
        SweepMode::Sampled { count, seed } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            for _ in 0..count {
                let table: Vec<u64> = (0..q)
                    .map(|y| {
                        let mut yp = rng.gen_range(0..q - 1);
                        if yp >= y {
                            yp += 1;
                        }
                        yp
                    })
                    .collect();
                let strategy = TamperStrategy::new(table)?;
                let eps = nm_error_for_table(params, src_x, src_y, &strategy)?;
                tables += 1;
                if eps > best {
                    best = eps;
                    worst_table = strategy.table;
                }
            }
        }
    }
    let k_prime = src_x.min_entropy();
    let k = src_y.min_entropy();
    let bound = nm_theorem_bound(params.p, params.n, k_prime, k);
    let in_force = bound <= 1.0;
    Ok(NmErrorReport {
        p: params.p,
        n: params.n,
        k_prime,
        k,
        measured: best.to_f64(),
        bound: in_force.then_some(bound),
        in_force,
        worst_table,
        tables,
        exhaustive,
    })
}

/// Exact worst-case forgery probability of the polynomial MAC at width m:
/// max over mu of sum_sigma Pr[tag(mu)=sigma] max_(mu'!=mu,sigma')
/// Pr[tag(mu')=sigma' | tag(mu)=sigma], exhaustive over all 2^(2m) keys.
pub fn test_mac_forgery(m: usize) -> Result<BigRational> {
    if m > 5 {
        return Err(Error::Regime(format!(
            "exhaustive forgery sweep caps at m = 5, got {m}"
        )));
    }
    let field = Gf2m::canonical(m)?;
    let q = 1u64 << m;
    let keys = q * q;
    let mut best = BigRational::zero();
    for mu in 0..q {
        // bucket keys by observed tag sigma
        let mut buckets: Vec<Vec<MacKey>> = vec![Vec::new(); q as usize];
        for k1 in 0..q {
            for k2 in 0..q {
                let key = MacKey::new(&field, k1, k2)?;
                buckets[mac_tag(&field, &key, mu) as usize].push(key);
            }
        }
        let mut success = BigRational::zero();
        for bucket in &buckets {
            if bucket.is_empty() {
                continue;
            }
            // adversary picks the best (mu', sigma') for this observation
            let mut best_count = 0u64;
            for mu2 in 0..q {
                if mu2 == mu {
                    continue;
                }
                let mut counts = vec![0u64; q as usize];
                for key in bucket {
                    counts[mac_tag(&field, key, mu2) as usize] += 1;
                }
                best_count = best_count.max(*counts.iter().max().expect("non-empty"));
            }
            success = success.add(&BigRational::from_ratio(best_count, keys));
        }
        if success > best {
            best = success;
        }
    }
    Ok(best)
}
