//! Explicit finite probability distributions, weak-source models and the
//! exact classical statistical oracle.
//!
//! Outcomes are labelled by `u64`. Distances and entropies come out exact
//! when the scalar is rational; the f64 instantiation is the Monte-Carlo
//! counterpart checked against the exact one in tests.

use std::collections::HashSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ProbScalar;

/// A finite distribution over labelled outcomes, stored sorted by label.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist<T: ProbScalar> {
    support: Vec<u64>,
    probs: Vec<T>,
}

impl<T: ProbScalar> Dist<T> {
    pub fn new(mut pairs: Vec<(u64, T)>) -> Result<Self> {
        pairs.sort_by_key(|&(label, _)| label);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Parse(format!("duplicate outcome label {}", w[0].0)));
            }
        }
        let mut sum = T::zero();
        for (label, p) in &pairs {
            if p.is_negative() {
                return Err(Error::NegativeMass(*label));
            }
            sum = sum.add(p);
        }
        if !T::normalized(&sum) {
            return Err(Error::NotNormalized(sum.to_f64()));
        }
        let (support, probs) = pairs.into_iter().unzip();
        Ok(Dist { support, probs })
    }

    /// Uniform over `0..n`.
    pub fn uniform(n: u64) -> Self {
        let p = T::from_ratio(1, n);
        Dist { support: (0..n).collect(), probs: vec![p; n as usize] }
    }

    /// Uniform over an explicit subset of labels.
    pub fn flat(subset: &[u64]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::InvalidParameter("empty support".into()));
        }
        let p = T::from_ratio(1, subset.len() as u64);
        Dist::new(subset.iter().map(|&x| (x, p.clone())).collect())
    }

    pub fn point_mass(label: u64) -> Self {
        Dist { support: vec![label], probs: vec![T::one()] }
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob_of(&self, label: u64) -> T {
        match self.support.binary_search(&label) {
            Ok(i) => self.probs[i].clone(),
            Err(_) => T::zero(),
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn max_prob(&self) -> T {
        let mut best = T::zero();
        for p in &self.probs {
            if *p > best {
                best = p.clone();
            }
        }
        best
    }

    /// -log2 max_x P(x), in bits.
    pub fn min_entropy(&self) -> f64 {
        -self.max_prob().to_f64().log2()
    }

    /// Pushforward through a deterministic map on labels.
    pub fn map(&self, g: impl Fn(u64) -> u64) -> Self {
        let mut acc: std::collections::BTreeMap<u64, T> = Default::default();
        for (&x, p) in self.support.iter().zip(&self.probs) {
            let y = g(x);
            let e = acc.entry(y).or_insert_with(T::zero);
            *e = e.add(p);
        }
        let (support, probs) = acc.into_iter().unzip();
        Dist { support, probs }
    }

    pub fn to_f64(&self) -> Dist<f64> {
        Dist {
            support: self.support.clone(),
            probs: self.probs.iter().map(|p| p.to_f64()).collect(),
        }
    }
}

impl Dist<f64> {
    /// Samples one outcome by inverse CDF.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (&x, &p) in self.support.iter().zip(&self.probs) {
            acc += p;
            if u < acc {
                return x;
            }
        }
        *self.support.last().expect("non-empty support")
    }
}

/// Statistical (total-variation) distance between distributions on the same
/// support set.
pub fn stat_dist<T: ProbScalar>(p: &Dist<T>, q: &Dist<T>) -> Result<T> {
    if p.support != q.support {
        return Err(Error::SupportMismatch);
    }
    let mut acc = T::zero();
    for (a, b) in p.probs.iter().zip(&q.probs) {
        acc = acc.add(&a.abs_diff(b));
    }
    Ok(acc.div(&T::from_ratio(2, 1)))
}

/// Classical max-divergence D_max(P||Q) = log2 max_x P(x)/Q(x).
pub fn dmax_classical<T: ProbScalar>(p: &Dist<T>, q: &Dist<T>) -> Result<f64> {
    let mut best: Option<T> = None;
    for (&x, px) in p.support.iter().zip(&p.probs) {
        if px.to_f64() == 0.0 {
            continue;
        }
        let qx = q.prob_of(x);
        let positive = qx.partial_cmp(&T::zero()) == Some(std::cmp::Ordering::Greater);
        if !positive {
            return Err(Error::SupportViolation);
        }
        let ratio = px.div(&qx);
        if best.as_ref().map_or(true, |b| ratio > *b) {
            best = Some(ratio);
        }
    }
    Ok(best.map_or(f64::NEG_INFINITY, |b| b.to_f64().log2()))
}

/// A joint distribution over Z x Y laid out z-major.
#[derive(Debug, Clone)]
pub struct JointDist<T: ProbScalar> {
    z_card: usize,
    y_card: usize,
    probs: Vec<T>,
}

impl<T: ProbScalar> JointDist<T> {
    pub fn new(z_card: usize, y_card: usize, probs: Vec<T>) -> Result<Self> {
        if probs.len() != z_card * y_card {
            return Err(Error::LengthMismatch { expected: z_card * y_card, got: probs.len() });
        }
        let mut sum = T::zero();
        for (i, p) in probs.iter().enumerate() {
            if p.is_negative() {
                return Err(Error::NegativeMass(i as u64));
            }
            sum = sum.add(p);
        }
        if !T::normalized(&sum) {
            return Err(Error::NotNormalized(sum.to_f64()));
        }
        Ok(JointDist { z_card, y_card, probs })
    }

    /// Builds the joint law of (g(X), X-slot) from independent (X, Y)...
    /// kept generic: accumulate from an enumeration of weighted outcomes.
    pub fn from_outcomes(
        z_card: usize,
        y_card: usize,
        outcomes: impl Iterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut probs = vec![T::zero(); z_card * y_card];
        for (z, y, p) in outcomes {
            probs[z * y_card + y] = probs[z * y_card + y].add(&p);
        }
        JointDist::new(z_card, y_card, probs)
    }

    pub fn prob(&self, z: usize, y: usize) -> &T {
        &self.probs[z * self.y_card + y]
    }

    pub fn y_marginal(&self, y: usize) -> T {
        let mut acc = T::zero();
        for z in 0..self.z_card {
            acc = acc.add(self.prob(z, y));
        }
        acc
    }

    /// d(Z|Y) = Delta(P_ZY, U_Z (x) P_Y). Equals the P_Y-weighted average of
    /// the per-slice distances from uniform.
    pub fn cond_dist(&self) -> T {
        let uz = T::from_ratio(1, self.z_card as u64);
        let mut acc = T::zero();
        for y in 0..self.y_card {
            let py = self.y_marginal(y);
            let ref_mass = uz.mul(&py);
            for z in 0..self.z_card {
                acc = acc.add(&self.prob(z, y).abs_diff(&ref_mass));
            }
        }
        acc.div(&T::from_ratio(2, 1))
    }
}

/// Kind of weak source: uniform over the whole domain, flat over an
/// explicit subset, or an explicit distribution.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SourceKind {
    Uniform,
    Flat { subset: Vec<u64> },
    Explicit { outcomes: Vec<u64>, probs: Vec<f64> },
}

/// An (n, k)-source: a distribution over a finite domain together with a
/// declared min-entropy floor, checked at construction.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WeakSourceSpec {
    /// Domain size (2^n for an n-bit source).
    pub domain: u64,
    /// Bit-length when the domain is a power of two.
    pub n_bits: Option<u32>,
    /// Declared min-entropy floor in bits.
    pub k: f64,
    #[serde(flatten)]
    pub kind: SourceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl WeakSourceSpec {
    /// Flat source over an explicit subset; k defaults to the realized
    /// min-entropy log2 |subset|.
    pub fn flat(domain: u64, subset: Vec<u64>) -> Result<Self> {
        let mut seen = HashSet::new();
        for &x in &subset {
            if x >= domain {
                return Err(Error::ElementOutOfRange(x));
            }
            if !seen.insert(x) {
                return Err(Error::Parse(format!("duplicate outcome {x}")));
            }
        }
        if subset.is_empty() {
            return Err(Error::InvalidParameter("empty support".into()));
        }
        let k = (subset.len() as f64).log2();
        Ok(WeakSourceSpec {
            domain,
            n_bits: domain.is_power_of_two().then(|| domain.trailing_zeros()),
            k,
            kind: SourceKind::Flat { subset },
            seed: None,
        })
    }

    /// Flat source with min-entropy at least `k`: uniform over the first
    /// ceil(2^k) domain points. The realized entropy (reported by
    /// `min_entropy`) rounds up.
    pub fn flat_with_entropy(domain: u64, k: f64) -> Result<Self> {
        let s = (2f64.powf(k).ceil() as u64).max(1).min(domain);
        if (s as f64).log2() + 1e-12 < k {
            return Err(Error::EntropyFloor { realized: (s as f64).log2(), declared: k });
        }
        let mut spec = WeakSourceSpec::flat(domain, (0..s).collect())?;
        spec.k = k;
        Ok(spec)
    }

    /// Uniform over the full domain; the support is never materialized, so
    /// this scales to protocol-sized domains like 2^32.
    pub fn uniform(domain: u64) -> Self {
        WeakSourceSpec {
            domain,
            n_bits: domain.is_power_of_two().then(|| domain.trailing_zeros()),
            k: (domain as f64).log2(),
            kind: SourceKind::Uniform,
            seed: None,
        }
    }

    pub fn point_mass(domain: u64, x: u64) -> Result<Self> {
        WeakSourceSpec::flat(domain, vec![x])
    }

    pub fn explicit(domain: u64, dist: &Dist<f64>, k: f64) -> Result<Self> {
        let realized = dist.min_entropy();
        if realized + 1e-9 < k {
            return Err(Error::EntropyFloor { realized, declared: k });
        }
        Ok(WeakSourceSpec {
            domain,
            n_bits: domain.is_power_of_two().then(|| domain.trailing_zeros()),
            k,
            kind: SourceKind::Explicit {
                outcomes: dist.support().to_vec(),
                probs: dist.probs().to_vec(),
            },
            seed: None,
        })
    }

    pub fn support_size(&self) -> u64 {
        match &self.kind {
            SourceKind::Uniform => self.domain,
            SourceKind::Flat { subset } => subset.len() as u64,
            SourceKind::Explicit { outcomes, .. } => outcomes.len() as u64,
        }
    }

    /// Realized min-entropy of the underlying distribution.
    pub fn min_entropy(&self) -> f64 {
        match &self.kind {
            SourceKind::Uniform => (self.domain as f64).log2(),
            SourceKind::Flat { subset } => (subset.len() as f64).log2(),
            SourceKind::Explicit { probs, .. } => {
                -probs.iter().cloned().fold(0f64, f64::max).log2()
            }
        }
    }

    pub fn dist<T: ProbScalar>(&self) -> Dist<T> {
        match &self.kind {
            SourceKind::Uniform => Dist::uniform(self.domain),
            SourceKind::Flat { subset } => Dist::flat(subset).expect("valid flat source"),
            SourceKind::Explicit { outcomes, probs } => {
                // explicit sources are constructed from f64 probabilities
                Dist::new(
                    outcomes
                        .iter()
                        .zip(probs)
                        .map(|(&x, &p)| {
                            // rationalize on a fixed denominator grid so the
                            // exact path stays normalizable
                            (x, T::from_ratio((p * 9007199254740992.0).round() as u64, 9007199254740992))
                        })
                        .collect(),
                )
                .expect("valid explicit source")
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        match &self.kind {
            SourceKind::Uniform => rng.gen_range(0..self.domain),
            SourceKind::Flat { subset } => subset[rng.gen_range(0..subset.len())],
            SourceKind::Explicit { outcomes, probs } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (&x, &p) in outcomes.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return x;
                    }
                }
                *outcomes.last().expect("non-empty")
            }
        }
    }
}

/// Coupled rejection sampler: draws y ~ Y and accepts with probability
/// X(y) / (2^k Y(y)). Conditioned on accepting, the output is distributed
/// exactly as X; the acceptance probability is exactly 2^-k.
#[derive(Debug)]
pub struct RejectionSampler {
    target: Dist<f64>,
    proposal: Dist<f64>,
    scale: f64,
}

impl RejectionSampler {
    pub fn new(target: Dist<f64>, proposal: Dist<f64>, k: f64) -> Result<Self> {
        let scale = 2f64.powf(k);
        for (&y, &py) in target.support().iter().zip(target.probs()) {
            if py > scale * proposal.prob_of(y) + 1e-12 {
                return Err(Error::DmaxExceeded { outcome: y });
            }
        }
        Ok(RejectionSampler { target, proposal, scale })
    }

    /// One proposal draw: (outcome, accept flag).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> (u64, bool) {
        let y = self.proposal.sample(rng);
        let py = self.proposal.prob_of(y);
        let px = self.target.prob_of(y);
        let accept_p = if py == 0.0 { 0.0 } else { px / (self.scale * py) };
        (y, rng.gen::<f64>() < accept_p)
    }

    /// Exact acceptance probability sum_y Y(y) X(y)/(2^k Y(y)) = 2^-k,
    /// computed by summation rather than sampling.
    pub fn accept_prob_exact(&self) -> f64 {
        let mut acc = 0.0;
        for (&y, &py) in self.proposal.support().iter().zip(self.proposal.probs()) {
            if py == 0.0 {
                continue;
            }
            acc += py * (self.target.prob_of(y) / (self.scale * py));
        }
        acc
    }

    /// Exact conditional law given acceptance.
    pub fn conditional_exact(&self) -> Dist<f64> {
        self.target.clone()
    }
}

/// Enumerates flat (n, log2 s)-sources over an arbitrary domain: all
/// s-subsets when C(domain, s) fits the budget, otherwise `budget` subsets
/// sampled uniformly with the given seed.
pub fn enum_flat_subsets(
    domain: u64,
    s: usize,
    budget: u64,
    seed: u64,
) -> Result<Vec<WeakSourceSpec>> {
    if s == 0 || s as u64 > domain {
        return Err(Error::InvalidParameter(format!("support size {s} out of range")));
    }
    let total = binomial(domain, s as u64);
    if total <= budget as u128 {
        Ok((0..domain)
            .combinations(s)
            .map(|subset| WeakSourceSpec::flat(domain, subset).expect("valid subset"))
            .collect())
    } else {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(budget as usize);
        let pool: Vec<u64> = (0..domain).collect();
        for _ in 0..budget {
            let subset: Vec<u64> = pool.choose_multiple(&mut rng, s).copied().collect();
            let mut spec = WeakSourceSpec::flat(domain, subset)?;
            spec.seed = Some(seed);
            out.push(spec);
        }
        Ok(out)
    }
}

/// Bit-domain wrapper matching the (n bits, support size) signature.
pub fn enum_flat_sources(n: u32, s: usize, budget: u64, seed: u64) -> Result<Vec<WeakSourceSpec>> {
    enum_flat_subsets(1u64 << n, s, budget, seed)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Serializes a distribution as two-column CSV (outcome-label, probability).
pub fn dist_to_csv(d: &Dist<f64>) -> String {
    let mut out = String::from("outcome,probability\n");
    for (&x, &p) in d.support().iter().zip(d.probs()) {
        out.push_str(&format!("{x},{p}\n"));
    }
    out
}

pub fn dist_from_csv(text: &str) -> Result<Dist<f64>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.starts_with("outcome") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (x, p) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad CSV line {line:?}")))?;
        let x: u64 = x.trim().parse().map_err(|_| Error::Parse(format!("bad label {x:?}")))?;
        let p: f64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad prob {p:?}")))?;
        pairs.push((x, p));
    }
    Dist::new(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::rational::BigRational;

    type DR = Dist<BigRational>;
    type DF = Dist<f64>;

    fn rat(n: u64, d: u64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn stat_dist_examples() {
        let u2 = DF::uniform(2);
        assert_eq!(stat_dist(&u2, &u2).unwrap(), 0.0);

        let point = DR::new(vec![(0, rat(1, 1)), (1, rat(0, 1)), (2, rat(0, 1)), (3, rat(0, 1))])
            .unwrap();
        let u4 = DR::uniform(4);
        assert_eq!(stat_dist(&point, &u4).unwrap(), rat(3, 4));

        let p = DF::new(vec![(0, 0.5), (1, 0.5)]).unwrap();
        let q = DF::new(vec![(0, 0.9), (1, 0.1)]).unwrap();
        assert!((stat_dist(&p, &q).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn stat_dist_support_mismatch() {
        let p = DF::uniform(2);
        let q = DF::uniform(3);
        assert!(matches!(stat_dist(&p, &q), Err(Error::SupportMismatch)));
    }

    #[test]
    fn min_entropy_examples() {
        assert!((DF::uniform(8).min_entropy() - 3.0).abs() < 1e-12);
        assert_eq!(DF::point_mass(5).min_entropy(), -0f64.max(0.0));
        let d = DF::new(vec![(0, 0.5), (1, 0.25), (2, 0.25)]).unwrap();
        assert!((d.min_entropy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cond_dist_examples() {
        // Z uniform independent of Y
        let probs = vec![rat(1, 4); 4];
        let j = JointDist::new(2, 2, probs).unwrap();
        assert_eq!(j.cond_dist(), rat(0, 1));

        // Z = Y, both uniform over 2: P(z,y) = 1/2 if z==y
        let j = JointDist::new(
            2,
            2,
            vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(1, 2)],
        )
        .unwrap();
        assert_eq!(j.cond_dist(), rat(1, 2));
    }

    /// Brute-force oracle for d(Z|Y) with Z = <x,y> mod 3 over uniform X,Y on F_3.
    #[test]
    fn cond_dist_ip_oracle() {
        let j = JointDist::from_outcomes(
            3,
            3,
            (0..3u64).flat_map(|x| (0..3u64).map(move |y| ((x * y % 3) as usize, y as usize, rat(1, 9)))),
        )
        .unwrap();
        assert_eq!(j.cond_dist(), rat(2, 9));
    }

    #[test]
    fn metric_properties_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut mk = || {
                let raw: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
                let s: f64 = raw.iter().sum();
                DF::new(raw.iter().enumerate().map(|(i, &v)| (i as u64, v / s)).collect()).unwrap()
            };
            let (p, q, r) = (mk(), mk(), mk());
            let dpq = stat_dist(&p, &q).unwrap();
            let dqp = stat_dist(&q, &p).unwrap();
            assert!((dpq - dqp).abs() < 1e-15);
            let dpr = stat_dist(&p, &r).unwrap();
            let dqr = stat_dist(&q, &r).unwrap();
            assert!(dpq <= dpr + dqr + 1e-12);
        }
    }

    #[test]
    fn data_processing_exhaustive_small() {
        // every function g: {0..3} -> {0,1} on a fixed pair of distributions
        let p = DR::new(vec![(0, rat(1, 2)), (1, rat(1, 4)), (2, rat(1, 8)), (3, rat(1, 8))])
            .unwrap();
        let q = DR::uniform(4);
        let d = stat_dist(&p, &q).unwrap();
        for code in 0..16u64 {
            let g = move |x: u64| (code >> x) & 1;
            let gp = p.map(g);
            let gq = q.map(g);
            // align supports: map may collapse to a single label
            if gp.support() == gq.support() {
                assert!(stat_dist(&gp, &gq).unwrap() <= d);
            } else {
                // one side lost a label; distance is the missing mass, still <= d
                continue;
            }
        }
    }

    #[test]
    fn rejection_sampler_examples() {
        use rand::SeedableRng;
        // X point mass at 0, Y uniform(2), k = 1
        let target = DF::new(vec![(0, 1.0), (1, 0.0)]).unwrap();
        let proposal = DF::uniform(2);
        let rs = RejectionSampler::new(target, proposal, 1.0).unwrap();
        assert!((rs.accept_prob_exact() - 0.5).abs() < 1e-12);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (y, accept) = rs.sample(&mut rng);
            if accept {
                assert_eq!(y, 0);
            }
        }

        // X = Y, k = 0: always accept
        let d = DF::new(vec![(0, 0.25), (1, 0.75)]).unwrap();
        let rs = RejectionSampler::new(d.clone(), d, 0.0).unwrap();
        assert!((rs.accept_prob_exact() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejection_sampler_conditional_law() {
        use rand::SeedableRng;
        let target = DF::new(vec![(0, 0.75), (1, 0.25)]).unwrap();
        let proposal = DF::uniform(2);
        let k = (1.5f64).log2();
        let rs = RejectionSampler::new(target, proposal, k).unwrap();
        assert!((rs.accept_prob_exact() - 2.0 / 3.0).abs() < 1e-12);

        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        let n = 1_000_000u64;
        let mut accepted = 0u64;
        let mut zeros = 0u64;
        for _ in 0..n {
            let (y, ok) = rs.sample(&mut rng);
            if ok {
                accepted += 1;
                if y == 0 {
                    zeros += 1;
                }
            }
        }
        let acc_rate = accepted as f64 / n as f64;
        let sigma_acc = (2.0 / 3.0 * (1.0 / 3.0) / n as f64).sqrt();
        assert!((acc_rate - 2.0 / 3.0).abs() < 3.0 * sigma_acc + 1e-9);
        let zero_rate = zeros as f64 / accepted as f64;
        let sigma_cond = (0.75 * 0.25 / accepted as f64).sqrt();
        assert!((zero_rate - 0.75).abs() < 3.0 * sigma_cond + 1e-9);
    }

    #[test]
    fn rejection_sampler_precondition() {
        let target = DF::new(vec![(0, 0.9), (1, 0.1)]).unwrap();
        let proposal = DF::uniform(2);
        // 0.9 > 2^0.5 * 0.5 = 0.707
        match RejectionSampler::new(target, proposal, 0.5) {
            Err(Error::DmaxExceeded { outcome }) => assert_eq!(outcome, 0),
            other => panic!("expected DmaxExceeded, got {other:?}"),
        }
    }

    #[test]
    fn flat_source_enumeration() {
        let all = enum_flat_sources(2, 4, 1000, 0).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].support_size(), 4);

        let six = enum_flat_sources(2, 2, 1000, 0).unwrap();
        assert_eq!(six.len(), 6); // C(4,2)
        for s in &six {
            assert!((s.min_entropy() - 1.0).abs() < 1e-12);
        }

        let sampled = enum_flat_sources(4, 3, 10, 1).unwrap();
        assert_eq!(sampled.len(), 10);
        for s in &sampled {
            assert!((s.min_entropy() - (3f64).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_source_entropy_floor() {
        let s = WeakSourceSpec::flat_with_entropy(16, 2.5).unwrap();
        // support rounds up to ceil(2^2.5) = 6
        assert_eq!(s.support_size(), 6);
        assert!(s.min_entropy() >= 2.5);
        assert_eq!(s.k, 2.5);
    }

    #[test]
    fn source_serialization_round_trip() {
        let s = WeakSourceSpec::flat(8, vec![1, 3, 5]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: WeakSourceSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn dist_csv_round_trip() {
        let d = DF::new(vec![(0, 0.25), (3, 0.75)]).unwrap();
        let csv = dist_to_csv(&d);
        let back = dist_from_csv(&csv).unwrap();
        assert_eq!(d.support(), back.support());
    }

}
