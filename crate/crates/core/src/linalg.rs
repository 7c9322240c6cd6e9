//! Dense complex linear algebra helpers.
//!
//! Everything here works on `nalgebra` dynamic matrices. Hermitian
//! eigendecomposition and SVD are delegated to nalgebra; this module only adds
//! the tolerance checks, ordering guarantees and small utilities the rest of
//! the crate relies on.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Maximum entrywise deviation tolerated before a matrix is rejected as
/// non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// Kronecker product `a ⊗ b`; row `i·rows(b) + k`, column `j·cols(b) + l`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// `max |m_ij|`
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest entrywise deviation from Hermiticity, `max |M - M†|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(M + M†) / 2`
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` belongs to `values[i]`.
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn min_vector(&self) -> CVector {
        self.vectors.column(0).into_owned()
    }

    /// `Σ λᵢ vᵢ vᵢ†`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.vectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (i, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(i);
            out += (v * v.adjoint()).scale(lambda);
        }
        out
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// The input is symmetrized before solving; inputs whose Hermitian defect
/// exceeds [`HERMITIAN_TOL`] are rejected.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigendecomposition needs a square matrix"));
    }
    let defect = hermitian_defect(m);
    if !(defect <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(herm_eig_unchecked(&hermitian_part(m)))
}

pub(crate) fn herm_eig_unchecked(m: &CMatrix) -> HermEig {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermEig { values, vectors }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    herm_eig(m).map(|e| e.min_value())
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `tol`.
pub fn numerical_rank(m: &CMatrix, tol: f64) -> usize {
    singular_values(m).into_iter().filter(|&s| s > tol).count()
}

/// Real part of `⟨v|M|v⟩`.
pub fn expectation(m: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(m * v)).re
}

/// Gram-Schmidt on the columns of `m`, dropping columns that are (numerically)
/// dependent on earlier ones.
pub fn orthonormalize_columns(m: &CMatrix) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::new();
    for col in m.column_iter() {
        let mut v: CVector = col.into_owned();
        // two passes keep the result orthonormal to machine precision
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-10 {
            basis.push(v.unscale(norm));
        }
    }
    basis
}

/// Extends `vectors` (assumed orthonormal, all of length `n`) to `target`
/// orthonormal vectors, drawing candidates from `pool` first and the standard
/// basis afterwards.
pub fn complete_orthonormal(mut vectors: Vec<CVector>, pool: &[CVector], n: usize, target: usize) -> Vec<CVector> {
    let unit = |i: usize| {
        let mut e = CVector::zeros(n);
        e[i] = re(1.0);
        e
    };
    let candidates = pool.iter().cloned().chain((0..n).map(unit));
    for cand in candidates {
        if vectors.len() >= target {
            break;
        }
        let mut v = cand;
        for _ in 0..2 {
            for b in &vectors {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            vectors.push(v.unscale(norm));
        }
    }
    vectors
}

pub fn columns_to_matrix(cols: &[CVector]) -> CMatrix {
    let n = cols.first().map_or(0, |c| c.len());
    CMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Matrix unit `|i⟩⟨j|` of size `n × n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = re(1.0);
    m
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}
