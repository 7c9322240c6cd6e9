//! Pure vectors on bipartite spaces and their Schmidt decomposition.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::operator::{BipartiteOperator, Subsystem};

/// Default threshold on Schmidt coefficients (not their squares).
pub const SCHMIDT_RANK_TOL: f64 = 1e-9;

/// A unit vector on `C^{dim_a} ⊗ C^{dim_b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureVector {
    dim_a: usize,
    dim_b: usize,
    amps: CVector,
}

impl PureVector {
    /// Normalizes `amps`; fails on a zero or wrongly sized vector.
    pub fn new(dim_a: usize, dim_b: usize, amps: CVector) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || amps.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch("amplitude vector length must equal dim_a * dim_b"));
        }
        let norm = amps.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::BadParameter("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self { dim_a, dim_b, amps: amps.unscale(norm) })
    }

    /// Builds `Σ cᵢ |aᵢ⟩|bᵢ⟩` from integer-labelled basis terms, then normalizes.
    pub fn from_terms(dim_a: usize, dim_b: usize, terms: &[(C64, usize, usize)]) -> Result<Self> {
        let mut amps = CVector::zeros(dim_a * dim_b);
        for &(coeff, i, j) in terms {
            if i >= dim_a || j >= dim_b {
                return Err(Error::DimensionMismatch("basis label out of range"));
            }
            amps[i * dim_b + j] += coeff;
        }
        Self::new(dim_a, dim_b, amps)
    }

    /// `|a⟩ ⊗ |b⟩`, normalized.
    pub fn product(a: &CVector, b: &CVector) -> Result<Self> {
        Self::new(a.len(), b.len(), linalg::kron_vec(a, b))
    }

    /// Reads a `dim_a × dim_b` amplitude matrix `M_ij = ⟨ij|ψ⟩`.
    pub fn from_amplitude_matrix(m: &CMatrix) -> Result<Self> {
        let (da, db) = m.shape();
        Self::new(da, db, CVector::from_fn(da * db, |idx, _| m[(idx / db, idx % db)]))
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

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `M_ij = ⟨ij|ψ⟩` as a `dim_a × dim_b` matrix.
    pub fn amplitude_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_a, self.dim_b, |i, j| self.amps[i * self.dim_b + j])
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> BipartiteOperator {
        BipartiteOperator::new(self.dim_a, self.dim_b, &self.amps * self.amps.adjoint())
            .expect("projector of a well-formed vector")
    }

    /// `⟨ψ|M|ψ⟩`
    pub fn expectation(&self, m: &BipartiteOperator) -> Result<f64> {
        if m.dims() != self.dims() {
            return Err(Error::DimensionMismatch("vector and operator live on different spaces"));
        }
        m.expectation(&self.amps)
    }

    pub fn schmidt(&self) -> SchmidtForm {
        SchmidtForm::of(self)
    }

    pub fn schmidt_rank(&self, tol: f64) -> usize {
        self.schmidt().rank(tol)
    }

    /// Local operators `(A ⊗ B)|ψ⟩`, renormalized.
    pub fn apply_local(&self, a: Option<&CMatrix>, b: Option<&CMatrix>) -> Result<Self> {
        let m = self.amplitude_matrix();
        // (A ⊗ B)|ψ⟩ has amplitude matrix A M Bᵀ
        let m = match a {
            Some(a) if a.ncols() == self.dim_a => a * m,
            Some(_) => return Err(Error::DimensionMismatch("A-side operator does not fit")),
            None => m,
        };
        let m = match b {
            Some(b) if b.ncols() == self.dim_b => m * b.transpose(),
            Some(_) => return Err(Error::DimensionMismatch("B-side operator does not fit")),
            None => m,
        };
        Self::from_amplitude_matrix(&m)
    }

    /// The reduced state on one factor.
    pub fn reduced(&self, keep: Subsystem) -> CMatrix {
        let other = match keep {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        };
        self.projector().partial_trace(other)
    }
}

/// `ψ = Σ cᵢ |aᵢ⟩ ⊗ |bᵢ⟩` with descending non-negative coefficients.
///
/// All `min(dim_a, dim_b)` terms are kept, including zero coefficients.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<CVector>,
    pub right_vectors: Vec<CVector>,
}

impl SchmidtForm {
    pub fn of(v: &PureVector) -> Self {
        let m = v.amplitude_matrix();
        let svd = m.svd(true, true);
        let u = svd.u.expect("left singular vectors requested");
        let v_t = svd.v_t.expect("right singular vectors requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        // M = U Σ V†, so |ψ⟩ = Σ σ_k u_k ⊗ (row k of V†)ᵀ
        let coefficients = order.iter().map(|&k| svd.singular_values[k]).collect();
        let left_vectors = order.iter().map(|&k| u.column(k).into_owned()).collect();
        let right_vectors = order.iter().map(|&k| v_t.row(k).transpose()).collect();
        Self { coefficients, left_vectors, right_vectors }
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    /// `Σ cᵢ aᵢ ⊗ bᵢ`
    pub fn reconstruct(&self) -> CVector {
        let da = self.left_vectors.first().map_or(0, |a| a.len());
        let db = self.right_vectors.first().map_or(0, |b| b.len());
        let mut out = CVector::zeros(da * db);
        for ((&coef, a), b) in self.coefficients.iter().zip(&self.left_vectors).zip(&self.right_vectors) {
            out += linalg::kron_vec(a, b).scale(coef);
        }
        out
    }
}
