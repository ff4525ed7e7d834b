//! Postselected-adversary instances for the two-wise extraction inequality:
//! entangled state, local maps with one-qubit success flags, conditioning on
//! both flags, and the computable check
//!
//!   log|X| - log|Z| + log Pr(A=1, B=1)  <=  2 log(1/epsilon)
//!
//! with epsilon = Delta(Phi_(Z Y M'), U_Z (x) Phi_(Y M')). Both local maps
//! act as isometries into (output registers (x) flag qubit); the whole
//! pre-measurement evolution is tracked as a pure state vector.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::xtr::TwoWiseSpec;

use super::cmat::{CMatrix, C64};
use super::trace_distance_mat;

/// A map into (output registers (x) one-qubit flag) with postselection on
/// the given flag value. Kraus completeness is verified at construction.
#[derive(Debug, Clone)]
pub struct PostselectedMap {
    pub kraus: Vec<CMatrix>,
    pub in_dim: usize,
    /// Output register dimensions, flag qubit last.
    pub out_dims: Vec<usize>,
    pub flag_value: usize,
}

impl PostselectedMap {
    pub fn new(kraus: Vec<CMatrix>, out_dims: Vec<usize>, flag_value: usize) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidParameter("empty Kraus set".into()));
        }
        if *out_dims.last().unwrap_or(&0) != 2 {
            return Err(Error::InvalidParameter("flag register must be a qubit".into()));
        }
        if flag_value > 1 {
            return Err(Error::InvalidParameter("flag value must be 0 or 1".into()));
        }
        let out_dim: usize = out_dims.iter().product();
        let in_dim = kraus[0].n_cols;
        let mut acc = CMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            if k.n_rows != out_dim || k.n_cols != in_dim {
                return Err(Error::LengthMismatch { expected: out_dim, got: k.n_rows });
            }
            acc = acc.add(&k.dagger().mul(k));
        }
        let defect = acc.sub(&CMatrix::identity(in_dim)).frob_norm_sq().sqrt();
        if defect > 1e-10 {
            return Err(Error::NotComplete(defect));
        }
        Ok(PostselectedMap { kraus, in_dim, out_dims, flag_value })
    }

    /// The single-Kraus isometry, when the map is one.
    pub fn isometry(&self) -> Result<&CMatrix> {
        if self.kraus.len() != 1 {
            return Err(Error::InvalidParameter(
                "instance requires an isometric (single-Kraus) map".into(),
            ));
        }
        Ok(&self.kraus[0])
    }

    /// Identity embedding |v> -> |v>|flag=1>: the trivial always-succeed map.
    pub fn trivial(in_dim: usize) -> Self {
        let mut k = CMatrix::zeros(in_dim * 2, in_dim);
        for i in 0..in_dim {
            k[(i * 2 + 1, i)] = C64::new(1.0, 0.0);
        }
        PostselectedMap { kraus: vec![k], in_dim, out_dims: vec![in_dim, 2], flag_value: 1 }
    }
}

// ---------------------------------------------------------------------------
// Pure-state register bookkeeping.
// ---------------------------------------------------------------------------

struct PureState {
    amps: Vec<C64>,
    dims: Vec<usize>,
    names: Vec<String>,
}

impl PureState {
    fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn position(&self, name: &str) -> usize {
        self.names.iter().position(|n| n == name).expect("register exists")
    }

    /// Reorders registers so that `order` lists the new left-to-right layout
    /// by old positions.
    fn permute(&self, order: &[usize]) -> PureState {
        assert_eq!(order.len(), self.dims.len());
        let new_dims: Vec<usize> = order.iter().map(|&i| self.dims[i]).collect();
        let new_names: Vec<String> = order.iter().map(|&i| self.names[i].clone()).collect();
        let n = self.dim();
        let mut amps = vec![C64::new(0.0, 0.0); n];
        // strides of old layout
        let mut old_strides = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            old_strides[i] = old_strides[i + 1] * self.dims[i + 1];
        }
        let mut digits = vec![0usize; new_dims.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            // decompose new_idx in the new layout
            let mut rem = new_idx;
            for (d, &nd) in digits.iter_mut().zip(&new_dims).rev() {
                *d = rem % nd;
                rem /= nd;
            }
            let mut old_idx = 0usize;
            for (pos, &old_reg) in order.iter().enumerate() {
                old_idx += digits[pos] * old_strides[old_reg];
            }
            *slot = self.amps[old_idx];
        }
        PureState { amps, dims: new_dims, names: new_names }
    }

    /// Applies an isometry to the named registers (consumed in the given
    /// order), replacing them with the named output registers at the front.
    fn apply_isometry(
        &mut self,
        in_regs: &[&str],
        iso: &CMatrix,
        out_dims: &[usize],
        out_names: &[&str],
    ) {
        let in_pos: Vec<usize> = in_regs.iter().map(|n| self.position(n)).collect();
        let mut order = in_pos.clone();
        for i in 0..self.dims.len() {
            if !in_pos.contains(&i) {
                order.push(i);
            }
        }
        let fronted = self.permute(&order);
        let in_dim: usize = in_pos.iter().map(|&i| self.dims[i]).product();
        let rest = fronted.dim() / in_dim;
        let out_dim: usize = out_dims.iter().product();
        assert_eq!(iso.n_cols, in_dim);
        assert_eq!(iso.n_rows, out_dim);
        let mut amps = vec![C64::new(0.0, 0.0); out_dim * rest];
        for i in 0..in_dim {
            for o in 0..out_dim {
                let w = iso[(o, i)];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                let src = &fronted.amps[i * rest..(i + 1) * rest];
                let dst = &mut amps[o * rest..(o + 1) * rest];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
        let mut dims: Vec<usize> = out_dims.to_vec();
        dims.extend_from_slice(&fronted.dims[in_regs.len()..]);
        let mut names: Vec<String> = out_names.iter().map(|s| s.to_string()).collect();
        names.extend_from_slice(&fronted.names[in_regs.len()..]);
        self.amps = amps;
        self.dims = dims;
        self.names = names;
    }

    /// Probability that the named qubit registers all read 1.
    fn flag_probability(&self, flags: &[&str]) -> f64 {
        let pos: Vec<usize> = flags.iter().map(|n| self.position(n)).collect();
        let mut strides = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        let mut acc = 0f64;
        for (idx, a) in self.amps.iter().enumerate() {
            if pos.iter().all(|&p| (idx / strides[p]) % self.dims[p] == 1) {
                acc += a.norm_sqr();
            }
        }
        acc
    }

    /// Projects the named qubits onto 1 and renormalizes.
    fn postselect(&mut self, flags: &[&str], prob: f64) {
        let pos: Vec<usize> = flags.iter().map(|n| self.position(n)).collect();
        let mut strides = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        let norm = prob.sqrt();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if pos.iter().all(|&p| (idx / strides[p]) % self.dims[p] == 1) {
                *a /= norm;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
    }

    /// Reduced density matrix of the named registers, in the given order.
    fn reduced_density(&self, keep: &[&str]) -> CMatrix {
        let keep_pos: Vec<usize> = keep.iter().map(|n| self.position(n)).collect();
        let mut order = keep_pos.clone();
        for i in 0..self.dims.len() {
            if !keep_pos.contains(&i) {
                order.push(i);
            }
        }
        let fronted = self.permute(&order);
        let keep_dim: usize = keep_pos.iter().map(|&i| self.dims[i]).product();
        let rest = fronted.dim() / keep_dim;
        let mut rho = CMatrix::zeros(keep_dim, keep_dim);
        for i in 0..keep_dim {
            for j in 0..keep_dim {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..rest {
                    acc += fronted.amps[i * rest + r] * fronted.amps[j * rest + r].conj();
                }
                rho[(i, j)] = acc;
            }
        }
        rho
    }
}

/// One verification instance: shared entangled state, two postselected local
/// maps and a two-wise independent function with |X| = |Y| (the inequality's
/// hypothesis; rejected otherwise at construction).
#[derive(Debug, Clone)]
pub struct Thm31Instance {
    pub f: TwoWiseSpec,
    /// Pure entangled state on N (x) M, flattened amplitudes.
    pub tau_nm: Vec<C64>,
    pub n_dim: usize,
    pub m_dim: usize,
    pub psi_a: PostselectedMap,
    pub psi_b: PostselectedMap,
    pub seed: Option<u64>,
}

impl Thm31Instance {
    pub fn new(
        f: TwoWiseSpec,
        tau_nm: Vec<C64>,
        n_dim: usize,
        m_dim: usize,
        psi_a: PostselectedMap,
        psi_b: PostselectedMap,
    ) -> Result<Self> {
        if f.x_card() != f.y_card() {
            return Err(Error::InvalidParameter(
                "the inequality requires |X| = |Y|".into(),
            ));
        }
        if tau_nm.len() != n_dim * m_dim {
            return Err(Error::LengthMismatch { expected: n_dim * m_dim, got: tau_nm.len() });
        }
        let norm: f64 = tau_nm.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        let dx = f.x_card() as usize;
        let dy = f.y_card() as usize;
        if psi_a.in_dim != dx * n_dim {
            return Err(Error::LengthMismatch { expected: dx * n_dim, got: psi_a.in_dim });
        }
        if psi_b.in_dim != dy * m_dim {
            return Err(Error::LengthMismatch { expected: dy * m_dim, got: psi_b.in_dim });
        }
        // keep the pre-measurement state at desk scale
        let pre_dim = dx * dx * n_dim * m_dim * dy * dy;
        if pre_dim > 4096 {
            return Err(Error::Regime(format!("instance dimension {pre_dim} too large")));
        }
        Ok(Thm31Instance { f, tau_nm, n_dim, m_dim, psi_a, psi_b, seed: None })
    }

    /// Trivial instance: no entanglement, always-succeeding flags.
    pub fn trivial(f: TwoWiseSpec, n_dim: usize, m_dim: usize) -> Result<Self> {
        let mut tau = vec![C64::new(0.0, 0.0); n_dim * m_dim];
        tau[0] = C64::new(1.0, 0.0);
        let dx = f.x_card() as usize;
        let dy = f.y_card() as usize;
        let psi_a = PostselectedMap::trivial(dx * n_dim);
        let psi_b = PostselectedMap::trivial(dy * m_dim);
        // reshape the trivial maps' output registers: (X1 n) -> (X1, N', A)
        let psi_a = PostselectedMap {
            out_dims: vec![dx, n_dim, 2],
            ..psi_a
        };
        let psi_b = PostselectedMap { out_dims: vec![dy, m_dim, 2], ..psi_b };
        Thm31Instance::new(f, tau, n_dim, m_dim, psi_a, psi_b)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Thm31Report {
    pub epsilon: f64,
    pub pr_ab: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Set when the joint success probability is below 1e-12 and the
    /// instance carries no information.
    pub skipped: bool,
    pub seed: Option<u64>,
}

/// Runs one instance end to end. Both maps must be isometric.
pub fn verify_thm31(instance: &Thm31Instance) -> Result<Thm31Report> {
    let dx = instance.f.x_card() as usize;
    let dy = instance.f.y_card() as usize;
    let dz = instance.f.z_card() as usize;
    let dn = instance.n_dim;
    let dm = instance.m_dim;

    // initial pure state over [X, X1, N, M, Y, Y1]:
    // (canonical purification of U_X) (x) tau_NM (x) (canonical purification of U_Y)
    let dims = vec![dx, dx, dn, dm, dy, dy];
    let names: Vec<String> =
        ["X", "X1", "N", "M", "Y", "Y1"].iter().map(|s| s.to_string()).collect();
    let total: usize = dims.iter().product();
    let mut amps = vec![C64::new(0.0, 0.0); total];
    let wx = 1.0 / (dx as f64).sqrt();
    let wy = 1.0 / (dy as f64).sqrt();
    for x in 0..dx {
        for n in 0..dn {
            for m in 0..dm {
                let tau = instance.tau_nm[n * dm + m];
                if tau.norm_sqr() == 0.0 {
                    continue;
                }
                for y in 0..dy {
                    // index over [X, X1, N, M, Y, Y1] with X1 = x, Y1 = y
                    let idx = ((((x * dx + x) * dn + n) * dm + m) * dy + y) * dy + y;
                    amps[idx] = tau * wx * wy;
                }
            }
        }
    }
    let mut state = PureState { amps, dims, names };

    // Alice's map acts on (X1, N) -> (X1, N', A); Bob's on (Y, M) -> (Y, M', B)
    let iso_a = instance.psi_a.isometry()?;
    state.apply_isometry(&["X1", "N"], iso_a, &instance.psi_a.out_dims, &["X1", "Np", "A"]);
    let iso_b = instance.psi_b.isometry()?;
    state.apply_isometry(&["Y", "M"], iso_b, &instance.psi_b.out_dims, &["Y", "Mp", "B"]);

    let pr_ab = state.flag_probability(&["A", "B"]);
    if pr_ab < 1e-12 {
        return Ok(Thm31Report {
            epsilon: f64::NAN,
            pr_ab,
            lhs: f64::NEG_INFINITY,
            rhs: f64::INFINITY,
            holds: true,
            skipped: true,
            seed: instance.seed,
        });
    }
    state.postselect(&["A", "B"], pr_ab);

    // reduced state on (X, Y, M'), then read X and Y in the computational
    // basis (they are classical registers; coherences are dropped)
    let dmp = instance.psi_b.out_dims[instance.psi_b.out_dims.len() - 2];
    let mut rho_xym = state.reduced_density(&["X", "Y", "Mp"]);
    for i in 0..rho_xym.n_rows {
        let (xi, yi) = (i / (dy * dmp), (i / dmp) % dy);
        for j in 0..rho_xym.n_cols {
            let (xj, yj) = (j / (dy * dmp), (j / dmp) % dy);
            if xi != xj || yi != yj {
                rho_xym[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }

    // rho_(Z Y M') and U_Z (x) rho_(Y M')
    let zym = dz * dy * dmp;
    let mut rho_zym = CMatrix::zeros(zym, zym);
    let mut rho_ym = CMatrix::zeros(dy * dmp, dy * dmp);
    for x in 0..dx {
        for y in 0..dy {
            let z = instance.f.eval_index(x as u64, y as u64)? as usize;
            for mi in 0..dmp {
                for mj in 0..dmp {
                    let v = rho_xym[((x * dy + y) * dmp + mi, (x * dy + y) * dmp + mj)];
                    rho_zym[((z * dy + y) * dmp + mi, (z * dy + y) * dmp + mj)] += v;
                    rho_ym[(y * dmp + mi, y * dmp + mj)] += v;
                }
            }
        }
    }
    let uz = CMatrix::identity(dz).scale(C64::new(1.0 / dz as f64, 0.0));
    let reference = uz.kron(&rho_ym);
    let epsilon = trace_distance_mat(&rho_zym, &reference)?;

    let lhs = (dx as f64).log2() - (dz as f64).log2() + pr_ab.log2();
    let rhs = 2.0 * (1.0 / epsilon).log2();
    let holds = epsilon < 1e-8 || lhs <= rhs + 1e-6;
    Ok(Thm31Report { epsilon, pr_ab, lhs, rhs, holds, skipped: false, seed: instance.seed })
}

/// Haar-random isometry (rows x cols, cols <= rows) via Gram-Schmidt on
/// Gaussian columns with positive diagonal normalization.
pub fn haar_isometry<R: rand::Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(cols <= rows);
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for _ in 0..cols {
        let mut v: Vec<C64> = (0..rows)
            .map(|_| C64::new(super::gauss(rng), super::gauss(rng)))
            .collect();
        for prev in &columns {
            let inner: C64 = prev.iter().zip(&v).map(|(p, x)| p.conj() * x).sum();
            for (x, p) in v.iter_mut().zip(prev) {
                *x -= inner * p;
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        // positive-diagonal phase normalization
        let lead = v.iter().find(|x| x.norm() > 1e-12).copied().unwrap_or(C64::new(1.0, 0.0));
        let phase = lead / lead.norm();
        for x in v.iter_mut() {
            *x = *x / (norm * phase);
        }
        columns.push(v);
    }
    let mut m = CMatrix::zeros(rows, cols);
    for (j, col) in columns.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    m
}

/// Seeded random instance at |X| = |Y| = 3, |N| = |M| = |N'| = |M'| = 2.
pub fn random_instance(seed: u64) -> Result<Thm31Instance> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let f = TwoWiseSpec::ip(3, 1)?;
    let (dn, dm) = (2usize, 2usize);
    let mut tau: Vec<C64> =
        (0..dn * dm).map(|_| C64::new(super::gauss(&mut rng), super::gauss(&mut rng))).collect();
    let norm: f64 = tau.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in tau.iter_mut() {
        *a /= norm;
    }
    let iso_a = haar_isometry(3 * 2 * 2, 3 * dn, &mut rng);
    let iso_b = haar_isometry(3 * 2 * 2, 3 * dm, &mut rng);
    let psi_a = PostselectedMap::new(vec![iso_a], vec![3, 2, 2], 1)?;
    let psi_b = PostselectedMap::new(vec![iso_b], vec![3, 2, 2], 1)?;
    let mut inst = Thm31Instance::new(f, tau, dn, dm, psi_a, psi_b)?;
    inst.seed = Some(seed);
    Ok(inst)
}

/// Serializes an instance with 17-significant-digit reals so independent
/// implementations can replay it bit-for-bit.
pub fn instance_to_json(inst: &Thm31Instance) -> String {
    let fmt_c = |c: &C64| format!("[\"{:.16e}\",\"{:.16e}\"]", c.re, c.im);
    let fmt_mat = |m: &CMatrix| {
        let entries: Vec<String> = m.a.iter().map(|c| fmt_c(c)).collect();
        format!(
            "{{\"rows\":{},\"cols\":{},\"data\":[{}]}}",
            m.n_rows,
            m.n_cols,
            entries.join(",")
        )
    };
    let tau: Vec<String> = inst.tau_nm.iter().map(|c| fmt_c(c)).collect();
    format!(
        "{{\"f\":{},\"n_dim\":{},\"m_dim\":{},\"tau_nm\":[{}],\"psi_a\":{},\"psi_b\":{},\"seed\":{}}}",
        serde_json::to_string(&inst.f).expect("spec serializes"),
        inst.n_dim,
        inst.m_dim,
        tau.join(","),
        fmt_mat(inst.psi_a.isometry().expect("isometric")),
        fmt_mat(inst.psi_b.isometry().expect("isometric")),
        inst.seed.map_or("null".into(), |s| s.to_string()),
    )
}
