//! Dense complex Hermitian matrices and a cyclic Jacobi eigensolver.
//!
//! The spin Hamiltonians in this crate are at most 9×9 (electronic spin-1
//! ⊗ ¹⁴N nuclear spin-1), so a dependency-free cyclic Jacobi iteration is
//! both adequate and exactly reproducible. Convergence criterion:
//! off-diagonal Frobenius norm below 1e-12·‖H‖.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("eigensolver failed to converge after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },
}

/// Square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim);
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Largest |H_ij − conj(H_ji)| over all pairs.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Add `scale * other` into `self`.
    pub fn add_scaled(&mut self, other: &CMatrix, scale: f64) {
        assert_eq!(self.dim, other.dim);
        for (dst, src) in self.data.iter_mut().zip(&other.data) {
            *dst += src * scale;
        }
    }

    /// Add `scale * (A ⊗ B)` into `self`; dimensions must satisfy
    /// dim(self) = dim(A)·dim(B).
    pub fn add_kron(&mut self, a: &CMatrix, b: &CMatrix, scale: f64) {
        let (na, nb) = (a.dim, b.dim);
        assert_eq!(self.dim, na * nb);
        for ia in 0..na {
            for ja in 0..na {
                let va = a[(ia, ja)];
                if va.norm_sqr() == 0.0 {
                    continue;
                }
                for ib in 0..nb {
                    for jb in 0..nb {
                        let vb = b[(ib, jb)];
                        if vb.norm_sqr() == 0.0 {
                            continue;
                        }
                        self[(ia * nb + ib, ja * nb + jb)] += va * vb * scale;
                    }
                }
            }
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let v = self[(i, k)];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += v * other[(k, j)];
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching eigenvector columns.
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// `vectors[k]` is the normalized eigenvector for `values[k]`.
    pub vectors: Vec<Vec<Complex64>>,
}

/// Cyclic Jacobi diagonalization for Hermitian matrices.
///
/// Annihilates each off-diagonal element with a complex Givens rotation,
/// sweeping until the off-diagonal Frobenius norm drops below
/// 1e-12·‖H‖ (or 1e-10·‖H‖ as a hard failure bound).
pub fn eigh(h: &CMatrix) -> Result<EigenDecomposition, LinalgError> {
    let n = h.dim;
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let target = 1e-12 * scale;
    let mut a = h.clone();
    let mut v = CMatrix::identity(n);

    const MAX_SWEEPS: usize = 100;
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if a.off_diagonal_norm() <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= target / (n as f64) {
                    continue;
                }
                // Phase and angle of the 2x2 rotation diagonalizing the
                // (p,q) block: tan(2θ) = 2|a_pq| / (a_pp − a_qq).
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let abs_apq = apq.norm();
                let phase = apq / abs_apq; // e^{iφ}
                let theta = 0.5 * (2.0 * abs_apq).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                let s_ph = phase * s; // complex sine

                // A ← Jᴴ A J with J = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * s_ph.conj();
                    a[(k, q)] = -akp * s_ph + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * s_ph;
                    a[(q, k)] = -apk * s_ph.conj() + aqk * c;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * s_ph.conj();
                    v[(k, q)] = -vkp * s_ph + vkq * c;
                }
            }
        }
    }

    let residual = a.off_diagonal_norm();
    if !converged && residual > 1e-10 * scale {
        return Err(LinalgError::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual: residual / scale,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());

    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[(row, col)]).collect())
        .collect();
    Ok(EigenDecomposition { values, vectors })
}
