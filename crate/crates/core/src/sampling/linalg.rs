//! Dense complex linear algebra for the samplers: Householder QR and a
//! cyclic Jacobi eigensolver for Hermitian matrices. Sizes here are desk
//! scale (n up to a few hundred), so simplicity and determinism win over
//! blocked kernels.

use num_complex::Complex64;

/// Column-major is unnecessary at this scale; row-major throughout.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }
}

/// In-place Householder QR: returns (Q, diag R). `a` is consumed as the
/// working storage for R.
pub(crate) fn householder_qr(mut a: CMatrix) -> (CMatrix, Vec<Complex64>) {
    let n = a.dim;
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for col in 0..n {
        // norm of the column below (and including) the diagonal
        let mut norm_sqr = 0.0;
        for row in col..n {
            norm_sqr += a.at(row, col).norm_sqr();
        }
        let norm = norm_sqr.sqrt();
        let x0 = a.at(col, col);
        let phase = if x0 == Complex64::ZERO { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        // v = x - alpha e1
        let mut v: Vec<Complex64> = (col..n).map(|row| a.at(row, col)).collect();
        v[0] -= alpha;
        let v_norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sqr > 0.0 {
            // apply H = I - 2 v v† / |v|² to the trailing block
            for j in col..n {
                let mut dot = Complex64::ZERO;
                for (k, vk) in v.iter().enumerate() {
                    dot += vk.conj() * a.at(col + k, j);
                }
                let scale = 2.0 * dot / v_norm_sqr;
                for (k, vk) in v.iter().enumerate() {
                    let cur = a.at(col + k, j);
                    a.set(col + k, j, cur - scale * vk);
                }
            }
        }
        reflectors.push(v);
    }
    let r_diag: Vec<Complex64> = (0..n).map(|i| a.at(i, i)).collect();

    // accumulate Q = H_1 H_2 ... H_n by applying reflectors to I in reverse
    let mut q = CMatrix::identity(n);
    for col in (0..n).rev() {
        let v = &reflectors[col];
        let v_norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sqr == 0.0 {
            continue;
        }
        for j in 0..n {
            let mut dot = Complex64::ZERO;
            for (k, vk) in v.iter().enumerate() {
                dot += vk.conj() * q.at(col + k, j);
            }
            let scale = 2.0 * dot / v_norm_sqr;
            for (k, vk) in v.iter().enumerate() {
                let cur = q.at(col + k, j);
                q.set(col + k, j, cur - scale * vk);
            }
        }
    }
    (q, r_diag)
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
pub(crate) fn hermitian_eigenvalues(mut a: CMatrix) -> Vec<f64> {
    let n = a.dim;
    if n == 1 {
        return vec![a.at(0, 0).re];
    }
    let frobenius: f64 = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tol = 1e-14 * frobenius.max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += a.at(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.at(p, q);
                let g = apq.norm();
                if g <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / g;
                let app = a.at(p, p).re;
                let aqq = a.at(q, q).re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase_conj = phase.conj();
                // columns: A <- A V with V the plane rotation
                for i in 0..n {
                    let x = a.at(i, p);
                    let y = a.at(i, q);
                    a.set(i, p, c * x - s * phase_conj * y);
                    a.set(i, q, s * phase * x + c * y);
                }
                // rows: A <- V† A
                for i in 0..n {
                    let x = a.at(p, i);
                    let y = a.at(q, i);
                    a.set(p, i, c * x - s * phase * y);
                    a.set(q, i, s * phase_conj * x + c * y);
                }
                // clean the eliminated pair against roundoff drift
                a.set(p, q, Complex64::ZERO);
                a.set(q, p, Complex64::ZERO);
                let new_pp = a.at(p, p);
                let new_qq = a.at(q, q);
                a.set(p, p, Complex64::new(new_pp.re, 0.0));
                a.set(q, q, Complex64::new(new_qq.re, 0.0));
            }
        }
    }
    let mut eigen: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
    eigen.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigen
}
