//! Small-dimension quantum numerics: density matrices with register
//! structure, the information quantities used by the verification suites
//! (trace distance, max-divergence, modified conditional min-entropy,
//! collision probability), and numerical checks of the inner-product
//! extraction inequality and its postselected-adversary form.
//!
//! Tolerances: states must be Hermitian, PSD and normalized within 1e-10;
//! eigenvalues are clipped at -1e-10 and anything more negative is an
//! error, not a silent clip.

pub mod cmat;
pub mod thm31;

use num_complex::Complex64;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::xtr::index_to_vec;
use cmat::{eigh, matrix_function_on_support, support_projector, CMatrix};

pub use thm31::{verify_thm31, PostselectedMap, Thm31Instance, Thm31Report};

const HERM_TOL: f64 = 1e-10;
const PSD_TOL: f64 = -1e-10;
const TRACE_TOL: f64 = 1e-10;
const SUPPORT_TOL: f64 = 1e-9;

/// A density matrix over an ordered list of named registers.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
    registers: Vec<(String, usize)>,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix, registers: Vec<(String, usize)>) -> Result<Self> {
        let dim: usize = registers.iter().map(|&(_, d)| d).product();
        if !mat.is_square() || mat.n_rows != dim {
            return Err(Error::LengthMismatch { expected: dim, got: mat.n_rows });
        }
        let defect = mat.hermiticity_defect();
        if defect > HERM_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let mat = mat.hermitian_part();
        let (vals, _) = eigh(&mat);
        if let Some(&l) = vals.first() {
            if l < PSD_TOL {
                return Err(Error::NotPsd(l));
            }
        }
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(tr));
        }
        Ok(DensityMatrix { mat, registers })
    }

    /// Maximally mixed state on one register.
    pub fn maximally_mixed(name: &str, dim: usize) -> Self {
        let m = CMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        DensityMatrix { mat: m, registers: vec![(name.into(), dim)] }
    }

    /// Classical diagonal state from a distribution on 0..dim.
    pub fn from_classical(name: &str, d: &Dist<f64>, dim: usize) -> Result<Self> {
        let mut m = CMatrix::zeros(dim, dim);
        for (&x, &p) in d.support().iter().zip(d.probs()) {
            if x as usize >= dim {
                return Err(Error::ElementOutOfRange(x));
            }
            m[(x as usize, x as usize)] = Complex64::new(p, 0.0);
        }
        DensityMatrix::new(m, vec![(name.into(), dim)])
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn registers(&self) -> &[(String, usize)] {
        &self.registers
    }

    pub fn dim(&self) -> usize {
        self.mat.n_rows
    }

    fn register_index(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownRegister(name.into()))
    }

    /// Tensor with another state (registers appended).
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        DensityMatrix { mat: self.mat.kron(&other.mat), registers }
    }
}

/// Partial trace keeping the named registers (in their original order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    for name in keep {
        rho.register_index(name)?;
    }
    let dims: Vec<usize> = rho.registers.iter().map(|&(_, d)| d).collect();
    let keep_mask: Vec<bool> =
        rho.registers.iter().map(|(n, _)| keep.contains(&n.as_str())).collect();
    let keep_dim: usize =
        dims.iter().zip(&keep_mask).filter(|&(_, &k)| k).map(|(&d, _)| d).product();
    let drop_dim: usize = rho.dim() / keep_dim;

    // decompose a full index into (keep part, drop part)
    let split = |mut idx: usize| -> (usize, usize) {
        let mut kept = 0usize;
        let mut dropped = 0usize;
        for (i, &d) in dims.iter().enumerate().rev() {
            let digit = idx % d;
            idx /= d;
            if keep_mask[i] {
                kept = kept + digit * (keep_dim / keep_partial(&dims, &keep_mask, i));
            } else {
                dropped = dropped + digit * (drop_dim / drop_partial(&dims, &keep_mask, i));
            }
        }
        (kept, dropped)
    };

    // product of kept dims from position i (inclusive) to the end
    fn keep_partial(dims: &[usize], mask: &[bool], i: usize) -> usize {
        dims[i..]
            .iter()
            .zip(&mask[i..])
            .filter(|&(_, &k)| k)
            .map(|(&d, _)| d)
            .product()
    }
    fn drop_partial(dims: &[usize], mask: &[bool], i: usize) -> usize {
        dims[i..]
            .iter()
            .zip(&mask[i..])
            .filter(|&(_, &k)| !k)
            .map(|(&d, _)| d)
            .product()
    }

    let mut out = CMatrix::zeros(keep_dim, keep_dim);
    let n = rho.dim();
    // cache index decompositions
    let parts: Vec<(usize, usize)> = (0..n).map(split).collect();
    for i in 0..n {
        let (ki, di) = parts[i];
        for j in 0..n {
            let (kj, dj) = parts[j];
            if di == dj {
                out[(ki, kj)] += rho.mat[(i, j)];
            }
        }
    }
    let registers: Vec<(String, usize)> = rho
        .registers
        .iter()
        .zip(&keep_mask)
        .filter(|&(_, &k)| k)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(DensityMatrix { mat: out, registers })
}

/// Trace distance (1/2)||rho - sigma||_1 between raw matrices.
pub fn trace_distance_mat(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if (a.n_rows, a.n_cols) != (b.n_rows, b.n_cols) {
        return Err(Error::LengthMismatch { expected: a.n_rows, got: b.n_rows });
    }
    let d = a.sub(b).hermitian_part();
    let (vals, _) = eigh(&d);
    Ok(vals.iter().map(|l| l.abs()).sum::<f64>() / 2.0)
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    trace_distance_mat(&a.mat, &b.mat)
}

/// Max-divergence D_max(rho || sigma) = log2 lambda_max of
/// sigma^(-1/2) rho sigma^(-1/2) on the support of sigma. `sigma` may be
/// any PSD operator (states or identity-extended marginals).
pub fn dmax_mat(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if (rho.n_rows, rho.n_cols) != (sigma.n_rows, sigma.n_cols) {
        return Err(Error::LengthMismatch { expected: rho.n_rows, got: sigma.n_rows });
    }
    // support check: mass of rho outside supp(sigma)
    let p = support_projector(sigma, SUPPORT_TOL * sigma_scale(sigma));
    let id = CMatrix::identity(rho.n_rows);
    let q = id.sub(&p);
    let outside = q.mul(rho).mul(&q).trace().re;
    if outside.abs() > 1e-9 {
        return Err(Error::SupportViolation);
    }
    let w = matrix_function_on_support(sigma, |l| 1.0 / l.sqrt(), SUPPORT_TOL * sigma_scale(sigma));
    let m = w.mul(rho).mul(&w).hermitian_part();
    let (vals, _) = eigh(&m);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    Ok(top.log2())
}

fn sigma_scale(sigma: &CMatrix) -> f64 {
    let (vals, _) = eigh(sigma);
    vals.last().copied().unwrap_or(1.0).abs().max(1e-300)
}

pub fn dmax(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    dmax_mat(&rho.mat, &sigma.mat)
}

/// Modified conditional min-entropy of the first register of a bipartite
/// state: -D_max(rho_XE || 1_X (x) rho_E).
pub fn hmin_mod(rho: &DensityMatrix, x_register: &str) -> Result<f64> {
    let idx = rho.register_index(x_register)?;
    if idx != 0 {
        return Err(Error::InvalidParameter(
            "hmin_mod expects the classical register first".into(),
        ));
    }
    let (_, x_dim) = rho.registers[idx].clone();
    let rest: Vec<&str> = rho.registers[1..].iter().map(|(n, _)| n.as_str()).collect();
    let sigma = if rest.is_empty() {
        CMatrix::identity(x_dim)
    } else {
        let rho_e = partial_trace(rho, &rest)?;
        CMatrix::identity(x_dim).kron(&rho_e.mat)
    };
    Ok(-dmax_mat(&rho.mat, &sigma)?)
}

/// Collision probability Gamma(rho_AB | rho_B) =
/// ||(1 (x) rho_B^(-1/4)) rho_AB (1 (x) rho_B^(-1/4))||_2^2.
pub fn collision_gamma(rho: &DensityMatrix) -> Result<f64> {
    if rho.registers.len() != 2 {
        return Err(Error::InvalidParameter("collision_gamma expects two registers".into()));
    }
    let a_dim = rho.registers[0].1;
    let b_name = rho.registers[1].0.clone();
    let rho_b = partial_trace(rho, &[b_name.as_str()])?;
    let w = matrix_function_on_support(
        &rho_b.mat,
        |l| 1.0 / l.powf(0.25),
        SUPPORT_TOL * sigma_scale(&rho_b.mat),
    );
    let sandwich = CMatrix::identity(a_dim).kron(&w);
    let m = sandwich.mul(&rho.mat).mul(&sandwich);
    Ok(m.frob_norm_sq())
}

/// The same quantity through the sandwiched Renyi-2 divergence
/// 2^(D_2(rho_AB || 1_A (x) rho_B)), computed by an independent spectral
/// route; used as the dual-path check.
pub fn collision_gamma_via_renyi(rho: &DensityMatrix) -> Result<f64> {
    if rho.registers.len() != 2 {
        return Err(Error::InvalidParameter("collision_gamma expects two registers".into()));
    }
    let a_dim = rho.registers[0].1;
    let b_name = rho.registers[1].0.clone();
    let rho_b = partial_trace(rho, &[b_name.as_str()])?;
    let sigma = CMatrix::identity(a_dim).kron(&rho_b.mat);
    let w = matrix_function_on_support(
        &sigma,
        |l| 1.0 / l.powf(0.25),
        SUPPORT_TOL * sigma_scale(&sigma),
    );
    let m = w.mul(&rho.mat).mul(&w).hermitian_part();
    let (vals, _) = eigh(&m);
    let tr_sq: f64 = vals.iter().map(|l| l * l).sum();
    // D_2 = log2 Tr[(sigma^{-1/4} rho sigma^{-1/4})^2]; Gamma = 2^(D_2)
    Ok(2f64.powf(tr_sq.log2()))
}

/// A classical-quantum state: classical register X with weights P(x) and a
/// conditional state on E per classical value.
#[derive(Debug, Clone)]
pub struct CQState {
    pub weights: Vec<f64>,
    pub conditionals: Vec<CMatrix>,
    pub e_dim: usize,
}

impl CQState {
    pub fn new(weights: Vec<f64>, conditionals: Vec<CMatrix>) -> Result<Self> {
        if weights.len() != conditionals.len() || weights.is_empty() {
            return Err(Error::LengthMismatch {
                expected: weights.len(),
                got: conditionals.len(),
            });
        }
        let e_dim = conditionals[0].n_rows;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(sum));
        }
        for (i, c) in conditionals.iter().enumerate() {
            if c.n_rows != e_dim || !c.is_square() {
                return Err(Error::LengthMismatch { expected: e_dim, got: c.n_rows });
            }
            if weights[i] < -1e-15 {
                return Err(Error::NegativeMass(i as u64));
            }
            let defect = c.hermiticity_defect();
            if defect > HERM_TOL {
                return Err(Error::NotHermitian(defect));
            }
            let (vals, _) = eigh(c);
            if let Some(&l) = vals.first() {
                if l < PSD_TOL {
                    return Err(Error::NotPsd(l));
                }
            }
            let tr = c.trace().re;
            if weights[i] > 1e-12 && (tr - 1.0).abs() > 1e-8 {
                return Err(Error::TraceNotOne(tr));
            }
        }
        Ok(CQState { weights, conditionals, e_dim })
    }

    pub fn x_dim(&self) -> usize {
        self.weights.len()
    }

    /// Block-diagonal density matrix over registers (X, M).
    pub fn to_density(&self, x_name: &str, e_name: &str) -> Result<DensityMatrix> {
        let dx = self.x_dim();
        let de = self.e_dim;
        let mut m = CMatrix::zeros(dx * de, dx * de);
        for x in 0..dx {
            for i in 0..de {
                for j in 0..de {
                    m[(x * de + i, x * de + j)] =
                        self.conditionals[x][(i, j)] * self.weights[x];
                }
            }
        }
        DensityMatrix::new(m, vec![(x_name.into(), dx), (e_name.into(), de)])
    }

    /// The marginal on E.
    pub fn e_marginal(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.e_dim, self.e_dim);
        for (w, c) in self.weights.iter().zip(&self.conditionals) {
            m = m.add(&c.scale(Complex64::new(*w, 0.0)));
        }
        m
    }
}

/// Outcome of one inner-product collision check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RennerReport {
    pub lhs: f64,
    pub rhs: f64,
    pub hmin_mod: f64,
    pub holds: bool,
}

/// Numerically verifies the hashed-collision inequality for Z = <X, y> over
/// uniform y in F_p^n against a c-q state on (X, M):
///
///   E_y sum_z Tr[(rho_M^(-1/2) (B_z^y - rho_M / p))^2]  <=  2^(-hmin_mod(X|M))
///
/// where B_z^y = sum_(x: <x,y> = z) P(x) rho_M^x. The right side uses the
/// modified min-entropy, which lower-bounds the conditional min-entropy the
/// statement is usually written with, so the checked form is the stronger
/// computable link of the chain.
pub fn verify_renner_ip(cq: &CQState, p: u64, n: usize) -> Result<RennerReport> {
    let alphabet = (p as u128).pow(n as u32);
    if cq.x_dim() as u128 != alphabet {
        return Err(Error::LengthMismatch { expected: alphabet as usize, got: cq.x_dim() });
    }
    if alphabet.saturating_mul(cq.e_dim as u128) > 200 {
        return Err(Error::Regime("renner check caps at total dimension 200".into()));
    }
    let rho_m = cq.e_marginal();
    let w = matrix_function_on_support(
        &rho_m,
        |l| 1.0 / l.sqrt(),
        SUPPORT_TOL * sigma_scale(&rho_m),
    );
    let up = 1.0 / p as f64;
    let y_count = alphabet as u64;
    let mut lhs = 0f64;
    for iy in 0..y_count {
        let y = index_to_vec(iy, p, n);
        // collect B_z for this y
        let mut blocks = vec![CMatrix::zeros(cq.e_dim, cq.e_dim); p as usize];
        for ix in 0..y_count {
            let x = index_to_vec(ix, p, n);
            let z: u64 = x
                .iter()
                .zip(&y)
                .fold(0u64, |acc, (&a, &b)| (acc + a * b) % p);
            blocks[z as usize] = blocks[z as usize]
                .add(&cq.conditionals[ix as usize].scale(Complex64::new(cq.weights[ix as usize], 0.0)));
        }
        for block in &blocks {
            let delta = block.sub(&rho_m.scale(Complex64::new(up, 0.0)));
            let m1 = w.mul(&delta).mul(&w);
            // Tr[(rho^{-1/2} delta)^2] = Tr[rho^{-1/2} delta rho^{-1/2} delta]
            lhs += m1.mul(&delta).trace().re;
        }
    }
    lhs /= y_count as f64;
    let dm = cq.to_density("X", "M")?;
    let h = hmin_mod(&dm, "X")?;
    let rhs = 2f64.powf(-h);
    Ok(RennerReport { lhs, rhs, hmin_mod: h, holds: lhs <= rhs + 1e-9 })
}

/// Random density matrix of the given dimension (normalized Wishart).
pub fn random_density<R: rand::Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let mut g = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(gauss(rng), gauss(rng));
        }
    }
    let m = g.mul(&g.dagger());
    let tr = m.trace().re;
    m.scale(Complex64::new(1.0 / tr, 0.0))
}

/// Standard normal via Box-Muller.
pub fn gauss<R: rand::Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_state() -> DensityMatrix {
        // |00> + |11| over two qubits
        let mut m = CMatrix::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                m[(i, j)] = c(0.5, 0.0);
            }
        }
        DensityMatrix::new(m, vec![("A".into(), 2), ("B".into(), 2)]).unwrap()
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let rho = bell_state();
        let a = partial_trace(&rho, &["A"]).unwrap();
        assert!((a.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((a.matrix()[(1, 1)].re - 0.5).abs() < 1e-12);
        assert!(a.matrix()[(0, 1)].norm() < 1e-12);
        assert!((a.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_product_state() {
        let a = DensityMatrix::from_classical(
            "A",
            &Dist::new(vec![(0, 0.25), (1, 0.75)]).unwrap(),
            2,
        )
        .unwrap();
        let b = DensityMatrix::maximally_mixed("B", 3);
        let ab = a.tensor(&b);
        let got = partial_trace(&ab, &["A"]).unwrap();
        assert!(trace_distance(&got, &a).unwrap() < 1e-12);
        let got_b = partial_trace(&ab, &["B"]).unwrap();
        assert!(trace_distance(&got_b, &b).unwrap() < 1e-12);
    }

    #[test]
    fn partial_trace_unknown_register() {
        let rho = bell_state();
        assert!(matches!(partial_trace(&rho, &["Z"]), Err(Error::UnknownRegister(_))));
    }

    #[test]
    fn trace_distance_cases() {
        let rho = bell_state();
        assert_eq!(trace_distance(&rho, &rho).unwrap(), 0.0);
        // orthogonal pure states
        let mut p0 = CMatrix::zeros(2, 2);
        p0[(0, 0)] = c(1.0, 0.0);
        let mut p1 = CMatrix::zeros(2, 2);
        p1[(1, 1)] = c(1.0, 0.0);
        let d0 = DensityMatrix::new(p0, vec![("Q".into(), 2)]).unwrap();
        let d1 = DensityMatrix::new(p1, vec![("Q".into(), 2)]).unwrap();
        assert!((trace_distance(&d0, &d1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_matches_classical() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        for _ in 0..20 {
            let raw: Vec<f64> = (0..5).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            let p =
                Dist::new(raw.iter().enumerate().map(|(i, &v)| (i as u64, v / s)).collect())
                    .unwrap();
            let raw2: Vec<f64> = (0..5).map(|_| rng.gen::<f64>()).collect();
            let s2: f64 = raw2.iter().sum();
            let q = Dist::new(
                raw2.iter().enumerate().map(|(i, &v)| (i as u64, v / s2)).collect(),
            )
            .unwrap();
            let dp = DensityMatrix::from_classical("X", &p, 5).unwrap();
            let dq = DensityMatrix::from_classical("X", &q, 5).unwrap();
            let classical = crate::dist::stat_dist(&p, &q).unwrap();
            let quantum = trace_distance(&dp, &dq).unwrap();
            assert!((classical - quantum).abs() < 1e-10);
        }
    }

    #[test]
    fn dmax_examples() {
        let u2 = DensityMatrix::maximally_mixed("X", 2);
        assert!(dmax(&u2, &u2).unwrap().abs() < 1e-9);

        let point = DensityMatrix::from_classical("X", &Dist::point_mass(0), 2).unwrap();
        assert!((dmax(&point, &u2).unwrap() - 1.0).abs() < 1e-9);

        let p = DensityMatrix::from_classical(
            "X",
            &Dist::new(vec![(0, 0.75), (1, 0.25)]).unwrap(),
            2,
        )
        .unwrap();
        assert!((dmax(&p, &u2).unwrap() - 1.5f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn dmax_support_violation() {
        let point0 = DensityMatrix::from_classical("X", &Dist::point_mass(0), 2).unwrap();
        let point1 = DensityMatrix::from_classical("X", &Dist::point_mass(1), 2).unwrap();
        assert!(matches!(dmax(&point0, &point1), Err(Error::SupportViolation)));
    }

    #[test]
    fn hmin_mod_examples() {
        let u4 = DensityMatrix::maximally_mixed("X", 4);
        assert!((hmin_mod(&u4, "X").unwrap() - 2.0).abs() < 1e-9);

        let point = DensityMatrix::from_classical("X", &Dist::point_mass(2), 4).unwrap();
        assert!(hmin_mod(&point, "X").unwrap().abs() < 1e-9);

        // with sigma_E = rho_E the definition is recovered exactly
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(21);
        let rho_e = random_density(3, &mut rng);
        let cq = CQState::new(
            vec![0.5, 0.5],
            vec![rho_e.clone(), rho_e.clone()],
        )
        .unwrap();
        let dm = cq.to_density("X", "E").unwrap();
        let h = hmin_mod(&dm, "X").unwrap();
        let sigma = CMatrix::identity(2).kron(&rho_e);
        let direct = -dmax_mat(dm.matrix(), &sigma).unwrap();
        assert!((h - direct).abs() < 1e-9);
        // product state with uniform X: hmin_mod = 1 bit
        assert!((h - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hmin_mod_bounds() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(33);
        for _ in 0..20 {
            use rand::Rng;
            let raw: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let s: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let conds: Vec<CMatrix> = (0..4).map(|_| random_density(2, &mut rng)).collect();
            let cq = CQState::new(weights, conds).unwrap();
            let dm = cq.to_density("X", "E").unwrap();
            let h = hmin_mod(&dm, "X").unwrap();
            assert!(h <= 2.0 + 1e-9, "hmin_mod {h} exceeds log|X|");
        }
        // trivial E keeps it within [0, log|X|]
        let u = DensityMatrix::maximally_mixed("X", 4);
        let h = hmin_mod(&u, "X").unwrap();
        assert!(h >= -1e-9 && h <= 2.0 + 1e-9);
    }

    #[test]
    fn collision_gamma_cases() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4);
        // U_A (x) rho_B -> 1/|A|
        for _ in 0..10 {
            let rho_b = random_density(3, &mut rng);
            let b = DensityMatrix::new(rho_b, vec![("B".into(), 3)]).unwrap();
            let ab = DensityMatrix::maximally_mixed("A", 2).tensor(&b);
            let g = collision_gamma(&ab).unwrap();
            assert!((g - 0.5).abs() < 1e-10, "gamma {g}");
        }
        // pure product state -> 1
        let mut pure = CMatrix::zeros(2, 2);
        pure[(0, 0)] = c(1.0, 0.0);
        let a = DensityMatrix::new(pure.clone(), vec![("A".into(), 2)]).unwrap();
        let b = DensityMatrix::new(pure, vec![("B".into(), 2)]).unwrap();
        let g = collision_gamma(&a.tensor(&b)).unwrap();
        assert!((g - 1.0).abs() < 1e-9);
    }

    #[test]
    fn collision_gamma_dual_route() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(14);
        for _ in 0..10 {
            let m = random_density(6, &mut rng);
            let rho = DensityMatrix::new(m, vec![("A".into(), 2), ("B".into(), 3)]).unwrap();
            let g1 = collision_gamma(&rho).unwrap();
            let g2 = collision_gamma_via_renyi(&rho).unwrap();
            assert!((g1 - g2).abs() < 1e-8, "{g1} vs {g2}");
        }
    }

    #[test]
    fn data_processing_random_channels() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(8);
        for _ in 0..50 {
            let rho_m = random_density(4, &mut rng);
            let sigma_m = random_density(4, &mut rng);
            // random channel: isometry into dim x env followed by tracing env
            let v = thm31::haar_isometry(8, 4, &mut rng);
            let apply = |m: &CMatrix| -> CMatrix {
                let big = v.mul(m).mul(&v.dagger());
                let dm = DensityMatrix {
                    mat: big,
                    registers: vec![("O".into(), 2), ("E".into(), 4)],
                };
                partial_trace(&dm, &["O"]).unwrap().mat
            };
            let rho2 = apply(&rho_m);
            let sigma2 = apply(&sigma_m);
            let before = trace_distance_mat(&rho_m, &sigma_m).unwrap();
            let after = trace_distance_mat(&rho2, &sigma2).unwrap();
            assert!(after <= before + 1e-8);
            let dmax_before = dmax_mat(&rho_m, &sigma_m).unwrap();
            let dmax_after = dmax_mat(&rho2, &sigma2).unwrap();
            assert!(dmax_after <= dmax_before + 1e-8);
        }
    }

    #[test]
    fn renner_trivial_m_uniform_x() {
        // classical brute force over the 9 (x, y) outcomes gives LHS = 2/9
        let cq = CQState::new(vec![1.0 / 3.0; 3], vec![CMatrix::identity(1); 3]).unwrap();
        let report = verify_renner_ip(&cq, 3, 1).unwrap();
        assert!((report.lhs - 2.0 / 9.0).abs() < 1e-10);
        assert!((report.rhs - 1.0 / 3.0).abs() < 1e-10);
        assert!(report.holds);
    }

    #[test]
    fn renner_point_mass_trivial_m() {
        let cq = CQState::new(vec![1.0, 0.0, 0.0], vec![CMatrix::identity(1); 3]).unwrap();
        let report = verify_renner_ip(&cq, 3, 1).unwrap();
        assert!((report.rhs - 1.0).abs() < 1e-10);
        assert!(report.holds);
    }

    #[test]
    fn renner_random_suite() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1234);
        for _ in 0..100 {
            let raw: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() + 1e-6).collect();
            let s: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let conds: Vec<CMatrix> = (0..3).map(|_| random_density(3, &mut rng)).collect();
            let cq = CQState::new(weights, conds).unwrap();
            let report = verify_renner_ip(&cq, 3, 1).unwrap();
            assert!(report.holds, "lhs={} rhs={}", report.lhs, report.rhs);
        }
    }

    #[test]
    fn density_validation_rejects_bad_inputs() {
        let mut nh = CMatrix::zeros(2, 2);
        nh[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            DensityMatrix::new(nh, vec![("X".into(), 2)]),
            Err(Error::NotHermitian(_))
        ));

        let mut neg = CMatrix::zeros(2, 2);
        neg[(0, 0)] = c(1.5, 0.0);
        neg[(1, 1)] = c(-0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(neg, vec![("X".into(), 2)]),
            Err(Error::NotPsd(_))
        ));

        let half = CMatrix::identity(2).scale(c(0.25, 0.0));
        assert!(matches!(
            DensityMatrix::new(half, vec![("X".into(), 2)]),
            Err(Error::TraceNotOne(_))
        ));
    }
}
