//! Dense complex matrices and a cyclic-Jacobi Hermitian eigensolver, sized
//! for desk-scale states (dimension <= a few hundred).

use num_complex::Complex64;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub a: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMatrix { n_rows, n_cols, a: vec![C64::new(0.0, 0.0); n_rows * n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut a = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols);
            a.extend_from_slice(r);
        }
        CMatrix { n_rows, n_cols, a }
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = CMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let s = self[(i, k)];
                if s.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += s * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(&other.a) {
            *x += y;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(&other.a) {
            *x -= y;
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        let mut out = self.clone();
        for x in out.a.iter_mut() {
            *x *= s;
        }
        out
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.n_rows * other.n_rows, self.n_cols * other.n_cols);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                let s = self[(i, j)];
                if s.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..other.n_rows {
                    for l in 0..other.n_cols {
                        out[(i * other.n_rows + k, j * other.n_cols + l)] = s * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.n_rows.min(self.n_cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.a.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Largest |a_ij - conj(a_ji)| over all pairs.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0f64;
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// (A + A^dagger) / 2.
    pub fn hermitian_part(&self) -> CMatrix {
        self.add(&self.dagger()).scale(C64::new(0.5, 0.0))
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.a[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.a[i * self.n_cols + j]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Returns eigenvalues ascending with their orthonormal eigenvectors as the
/// columns of the second matrix.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert!(m.is_square());
    let n = m.n_rows;
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        let mut off = 0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + a.frob_norm_sq().sqrt()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = apq / mag; // e^{i theta}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // unitary J: columns p,q mix with phases so J^+ A J kills a_pq
                let jpp = C64::new(c, 0.0);
                let jpq = phase * s;
                let jqp = -phase.conj() * s;
                let jqq = C64::new(c, 0.0);
                // rows/cols update of A: A <- J^+ A J, acting on rows/cols p,q
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> =
        (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite eigenvalues"));
    let eigvals: Vec<f64> = pairs.iter().map(|&(l, _)| l).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for k in 0..n {
            vecs[(k, new_col)] = v[(k, old_col)];
        }
    }
    (eigvals, vecs)
}

/// f applied to the spectrum on the support (eigenvalues > support_tol in
/// absolute value); eigenvalues inside the tolerance band map to zero.
pub fn matrix_function_on_support(
    m: &CMatrix,
    f: impl Fn(f64) -> f64,
    support_tol: f64,
) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let n = m.n_rows;
    let mut out = CMatrix::zeros(n, n);
    for (idx, &l) in vals.iter().enumerate() {
        let fl = if l.abs() <= support_tol { 0.0 } else { f(l) };
        if fl == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += vecs[(i, idx)] * vecs[(j, idx)].conj() * fl;
            }
        }
    }
    out
}

/// Projector onto the span of eigenvectors with eigenvalue > tol.
pub fn support_projector(m: &CMatrix, tol: f64) -> CMatrix {
    matrix_function_on_support(m, |_| 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigh_pauli_y() {
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ]);
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // residual check A v = lambda v
        for k in 0..2 {
            for i in 0..2 {
                let mut av = c(0.0, 0.0);
                for j in 0..2 {
                    av += m[(i, j)] * vecs[(j, k)];
                }
                assert!((av - vecs[(i, k)] * vals[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eigh_random_hermitian_residual() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for n in [3usize, 7, 16] {
            let mut m = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                }
            }
            let h = m.hermitian_part();
            let (vals, vecs) = eigh(&h);
            // trace preserved
            let tr: f64 = vals.iter().sum();
            assert!((tr - h.trace().re).abs() < 1e-10);
            // residuals
            for k in 0..n {
                let mut worst = 0f64;
                for i in 0..n {
                    let mut av = c(0.0, 0.0);
                    for j in 0..n {
                        av += h[(i, j)] * vecs[(j, k)];
                    }
                    worst = worst.max((av - vecs[(i, k)] * vals[k]).norm());
                }
                assert!(worst < 1e-10, "residual {worst}");
            }
            // orthonormal columns
            let g = vecs.dagger().mul(&vecs);
            assert!(g.sub(&CMatrix::identity(n)).frob_norm_sq().sqrt() < 1e-10);
        }
    }

    #[test]
    fn matrix_function_inverse_sqrt() {
        let m = CMatrix::from_rows(&[
            vec![c(4.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(9.0, 0.0)],
        ]);
        let r = matrix_function_on_support(&m, |l| 1.0 / l.sqrt(), 1e-12);
        assert!((r[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((r[(1, 1)].re - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn kron_and_trace() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]]);
        let b = CMatrix::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.n_rows, 6);
        assert!((k.trace().re - 9.0).abs() < 1e-12);
    }
}
