//! Operators on `H_A ⊗ H_B` and the index bookkeeping around them.
//!
//! Basis convention: `|i⟩_A ⊗ |j⟩_B` is stored at index `i·dim_b + j`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermEig, C64};

/// One factor of a bipartite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// A square complex matrix acting on `C^{dim_a} ⊗ C^{dim_b}`.
///
/// Hermiticity, positivity and unit trace are not enforced; witnesses are
/// generally indefinite. Use [`crate::states::DensityMatrix`] for states.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteOperator {
    dim_a: usize,
    dim_b: usize,
    mat: CMatrix,
}

impl BipartiteOperator {
    pub fn new(dim_a: usize, dim_b: usize, mat: CMatrix) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::DimensionMismatch("subsystem dimensions must be positive"));
        }
        let n = dim_a * dim_b;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch("matrix side must equal dim_a * dim_b"));
        }
        Ok(Self { dim_a, dim_b, mat })
    }

    pub fn zeros(dim_a: usize, dim_b: usize) -> Self {
        let n = dim_a * dim_b;
        Self { dim_a, dim_b, mat: CMatrix::zeros(n, n) }
    }

    pub fn identity(dim_a: usize, dim_b: usize) -> Self {
        let n = dim_a * dim_b;
        Self { dim_a, dim_b, mat: CMatrix::identity(n, n) }
    }

    /// `a ⊗ b` for local operators `a` on A and `b` on B.
    pub fn product(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        if !a.is_square() || !b.is_square() {
            return Err(Error::DimensionMismatch("local factors must be square"));
        }
        Self::new(a.nrows(), b.nrows(), linalg::kron(a, b))
    }

    /// `|ψ⟩⟨ψ|` for a vector on the given space; the vector need not be normalized.
    pub fn projector(dim_a: usize, dim_b: usize, v: &CVector) -> Result<Self> {
        Self::new(dim_a, dim_b, v * v.adjoint())
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    /// Side length of the matrix.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.dim_b + j
    }

    pub fn same_dims(&self, other: &Self) -> bool {
        self.dims() == other.dims()
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { mat: self.mat.scale(s), ..*self }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_dims(other) {
            return Err(Error::DimensionMismatch("operands live on different spaces"));
        }
        Ok(Self { mat: &self.mat + &other.mat, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !self.same_dims(other) {
            return Err(Error::DimensionMismatch("operands live on different spaces"));
        }
        Ok(Self { mat: &self.mat * &other.mat, ..*self })
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint(), ..*self }
    }

    /// `Tr(self · other)`
    pub fn trace_with(&self, other: &Self) -> Result<C64> {
        if !self.same_dims(other) {
            return Err(Error::DimensionMismatch("operands live on different spaces"));
        }
        // Tr(XY) = Σ_ij X_ij Y_ji without forming the product
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.mat[(i, j)] * other.mat[(j, i)];
            }
        }
        Ok(acc)
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn eig(&self) -> Result<HermEig> {
        linalg::herm_eig(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        linalg::min_eigenvalue(&self.mat)
    }

    /// Minimum eigenvalue ≥ `-tol` (requires Hermiticity).
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }

    /// Real part of `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &CVector) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch("vector length differs from operator side"));
        }
        Ok(linalg::expectation(&self.mat, v))
    }

    /// Partial transpose on the named factor.
    ///
    /// For `B`: `(ik|M^{T_B}|jl) = (il|M|jk)`.
    pub fn partial_transpose(&self, sys: Subsystem) -> Self {
        let (da, db) = self.dims();
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..da {
            for k in 0..db {
                for j in 0..da {
                    for l in 0..db {
                        let (src_r, src_c) = match sys {
                            Subsystem::B => (i * db + l, j * db + k),
                            Subsystem::A => (j * db + k, i * db + l),
                        };
                        out[(i * db + k, j * db + l)] = self.mat[(src_r, src_c)];
                    }
                }
            }
        }
        Self { mat: out, ..*self }
    }

    /// Traces out the named factor and returns the operator on the other one.
    pub fn partial_trace(&self, sys: Subsystem) -> CMatrix {
        let (da, db) = self.dims();
        match sys {
            Subsystem::A => CMatrix::from_fn(db, db, |k, l| (0..da).map(|i| self.mat[(i * db + k, i * db + l)]).sum()),
            Subsystem::B => CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| self.mat[(i * db + k, j * db + k)]).sum()),
        }
    }

    /// The same operator on `B ⊗ A`.
    pub fn swap_subsystems(&self) -> Self {
        let (da, db) = self.dims();
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..da {
            for k in 0..db {
                for j in 0..da {
                    for l in 0..db {
                        out[(k * da + i, l * da + j)] = self.mat[(i * db + k, j * db + l)];
                    }
                }
            }
        }
        Self { dim_a: db, dim_b: da, mat: out }
    }

    /// `(X ⊗ 1) M (Y ⊗ 1)`, with `X: d' × dim_a` and `Y: dim_a × d'`.
    pub fn sandwich_a(&self, left: &CMatrix, right: &CMatrix) -> Result<Self> {
        if left.ncols() != self.dim_a || right.nrows() != self.dim_a || left.nrows() != right.ncols() {
            return Err(Error::DimensionMismatch("A-side sandwich factors do not fit"));
        }
        let id = CMatrix::identity(self.dim_b, self.dim_b);
        let l = linalg::kron(left, &id);
        let r = linalg::kron(right, &id);
        Self::new(left.nrows(), self.dim_b, l * &self.mat * r)
    }

    /// `(1 ⊗ X) M (1 ⊗ Y)`, with `X: d' × dim_b` and `Y: dim_b × d'`.
    pub fn sandwich_b(&self, left: &CMatrix, right: &CMatrix) -> Result<Self> {
        if left.ncols() != self.dim_b || right.nrows() != self.dim_b || left.nrows() != right.ncols() {
            return Err(Error::DimensionMismatch("B-side sandwich factors do not fit"));
        }
        let id = CMatrix::identity(self.dim_a, self.dim_a);
        let l = linalg::kron(&id, left);
        let r = linalg::kron(&id, right);
        Self::new(self.dim_a, left.nrows(), l * &self.mat * r)
    }

    /// Block `(i, j)` over the A index, i.e. `⟨i|_A M |j⟩_A` as a `dim_b × dim_b` matrix.
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        let db = self.dim_b;
        self.mat.view((i * db, j * db), (db, db)).into_owned()
    }
}

/// Index permutation taking the pair ordering `(A₁B₁)(A₂B₂)…(AₙBₙ)` to the
/// grouped ordering `(A₁…Aₙ)(B₁…Bₙ)`. Entry `p` holds the grouped index of
/// pair-ordered index `p`.
pub fn pair_to_grouped_permutation(dim_a: usize, dim_b: usize, n: usize) -> Vec<usize> {
    let total = (dim_a * dim_b).pow(n as u32);
    let mut perm = Vec::with_capacity(total);
    let mut a_digits = alloc::vec![0usize; n];
    let mut b_digits = alloc::vec![0usize; n];
    for p in 0..total {
        // pair-ordered digits, most significant pair first
        let mut rest = p;
        for copy in (0..n).rev() {
            b_digits[copy] = rest % dim_b;
            rest /= dim_b;
            a_digits[copy] = rest % dim_a;
            rest /= dim_a;
        }
        let a_index = a_digits.iter().fold(0, |acc, &x| acc * dim_a + x);
        let b_index = b_digits.iter().fold(0, |acc, &x| acc * dim_b + x);
        perm.push(a_index * dim_b.pow(n as u32) + b_index);
    }
    perm
}

/// Side length up to which [`permute_to_bipartite`] uses an explicit
/// permutation matrix; above it entries are remapped directly.
pub const EXPLICIT_PERMUTATION_MAX_DIM: usize = 81;

fn check_power_dims(m: &CMatrix, dim_a: usize, dim_b: usize, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::BadParameter("number of copies must be at least 1"));
    }
    let total =
        (dim_a * dim_b).checked_pow(n as u32).ok_or(Error::DimensionMismatch("tensor power dimension overflows"))?;
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::DimensionMismatch("matrix side must equal (dim_a * dim_b)^n"));
    }
    Ok(total)
}

fn apply_permutation(m: &CMatrix, perm: &[usize], forward: bool) -> CMatrix {
    let total = perm.len();
    if total <= EXPLICIT_PERMUTATION_MAX_DIM {
        // P[perm[p], p] = 1 maps pair ordering to grouped ordering
        let mut p_mat = CMatrix::zeros(total, total);
        for (p, &g) in perm.iter().enumerate() {
            p_mat[(g, p)] = linalg::re(1.0);
        }
        if forward {
            &p_mat * m * p_mat.transpose()
        } else {
            p_mat.transpose() * m * &p_mat
        }
    } else {
        let mut out = CMatrix::zeros(total, total);
        for (p, &g) in perm.iter().enumerate() {
            for (q, &h) in perm.iter().enumerate() {
                if forward {
                    out[(g, h)] = m[(p, q)];
                } else {
                    out[(p, q)] = m[(g, h)];
                }
            }
        }
        out
    }
}

/// Regroups an operator on `(A⊗B)^{⊗n}` in pair ordering into a bipartite
/// operator on `A^{⊗n} ⊗ B^{⊗n}`.
pub fn permute_to_bipartite(m: &CMatrix, dim_a: usize, dim_b: usize, n: usize) -> Result<BipartiteOperator> {
    check_power_dims(m, dim_a, dim_b, n)?;
    let perm = pair_to_grouped_permutation(dim_a, dim_b, n);
    BipartiteOperator::new(dim_a.pow(n as u32), dim_b.pow(n as u32), apply_permutation(m, &perm, true))
}

/// Inverse of [`permute_to_bipartite`]: returns the pair-ordered matrix of a
/// grouped operator whose factors are `dim_a^n` and `dim_b^n`.
pub fn permute_to_pairs(op: &BipartiteOperator, dim_a: usize, dim_b: usize, n: usize) -> Result<CMatrix> {
    if op.dim_a() != dim_a.pow(n as u32) || op.dim_b() != dim_b.pow(n as u32) {
        return Err(Error::DimensionMismatch("operator is not on A^n ⊗ B^n"));
    }
    check_power_dims(op.matrix(), dim_a, dim_b, n)?;
    let perm = pair_to_grouped_permutation(dim_a, dim_b, n);
    Ok(apply_permutation(op.matrix(), &perm, false))
}

/// Regroups a pair-ordered vector on `(A⊗B)^{⊗n}` into `A^{⊗n} ⊗ B^{⊗n}` ordering.
pub fn permute_vector_to_bipartite(v: &CVector, dim_a: usize, dim_b: usize, n: usize) -> Result<CVector> {
    let perm = pair_to_grouped_permutation(dim_a, dim_b, n);
    if v.len() != perm.len() {
        return Err(Error::DimensionMismatch("vector length must equal (dim_a * dim_b)^n"));
    }
    let mut out = CVector::zeros(v.len());
    for (p, &g) in perm.iter().enumerate() {
        out[g] = v[p];
    }
    Ok(out)
}
