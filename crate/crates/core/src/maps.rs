//! Linear maps on operators and their Jamiołkowski operators.
//!
//! A map `Λ: B(C^{d_in}) → B(C^{d_out})` corresponds to the operator
//! `D = d (1 ⊗ Λ) P₊ = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)` on `C^{d_in} ⊗ C^{d_out}`,
//! and back through `Λ(X) = Tr_A[D (Xᵀ ⊗ 1)]`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::operator::{BipartiteOperator, Subsystem};
use crate::search::{rank_constrained_min, SearchParams, Verdict};
use crate::states::DensityMatrix;
use crate::vector::{PureVector, SCHMIDT_RANK_TOL};

/// A linear map between square matrices.
pub trait LinearMap {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    /// Applies the map; `x` must be `dim_in × dim_in`.
    fn apply(&self, x: &CMatrix) -> Result<CMatrix>;
}

fn check_input(x: &CMatrix, d: usize) -> Result<()> {
    if x.nrows() != d || x.ncols() != d {
        Err(Error::DimensionMismatch("map input has the wrong size"))
    } else {
        Ok(())
    }
}

/// `A ↦ Σ Vᵢ A Vᵢ†`, or `A ↦ Σ Vᵢ Aᵀ Vᵢ†` when `pre_transpose` is set.
///
/// Without the transpose the map is completely positive. With it, and every
/// `Vᵢ` of rank ≤ 2, the map is two-decomposable.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapRep {
    kraus: Vec<CMatrix>,
    pre_transpose: bool,
}

impl LinearMapRep {
    pub fn new(kraus: Vec<CMatrix>, pre_transpose: bool) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::BadParameter("at least one Kraus operator is required"));
        };
        let shape = first.shape();
        if kraus.iter().any(|k| k.shape() != shape) {
            return Err(Error::DimensionMismatch("Kraus operators must share dimensions"));
        }
        Ok(Self { kraus, pre_transpose })
    }

    pub fn identity(d: usize) -> Self {
        Self { kraus: alloc::vec![CMatrix::identity(d, d)], pre_transpose: false }
    }

    pub fn transpose(d: usize) -> Self {
        Self { kraus: alloc::vec![CMatrix::identity(d, d)], pre_transpose: true }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn pre_transpose(&self) -> bool {
        self.pre_transpose
    }

    /// Largest numerical rank among the Kraus operators.
    pub fn max_kraus_rank(&self, tol: f64) -> usize {
        self.kraus.iter().map(|k| linalg::numerical_rank(k, tol)).max().unwrap_or(0)
    }

    /// Transpose-composed with every Kraus operator of rank ≤ 2.
    pub fn is_two_decomposable(&self, tol: f64) -> bool {
        self.pre_transpose && self.max_kraus_rank(tol) <= 2
    }

    /// The map `Λ†` with `Tr(A Λ(B)) = Tr(Λ†(A) B)`.
    ///
    /// Kraus operators become `Vᵢ†`, or `Vᵢᵀ` when the map transposes first.
    pub fn adjoint(&self) -> Self {
        let kraus = self.kraus.iter().map(|k| if self.pre_transpose { k.transpose() } else { k.adjoint() }).collect();
        Self { kraus, pre_transpose: self.pre_transpose }
    }

    /// `Λ ∘ T` for a CP map, `Λ^{CP}` for a transpose-composed one.
    pub fn toggle_transpose(&self) -> Self {
        Self { kraus: self.kraus.clone(), pre_transpose: !self.pre_transpose }
    }
}

impl LinearMap for LinearMapRep {
    fn dim_in(&self) -> usize {
        self.kraus[0].ncols()
    }

    fn dim_out(&self) -> usize {
        self.kraus[0].nrows()
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_input(x, self.dim_in())?;
        let input = if self.pre_transpose { x.transpose() } else { x.clone() };
        let mut out = CMatrix::zeros(self.dim_out(), self.dim_out());
        for k in &self.kraus {
            out += k * &input * k.adjoint();
        }
        Ok(out)
    }
}

/// `X ↦ Tr_A[D (Xᵀ ⊗ 1)]` for a stored operator `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMap {
    op: BipartiteOperator,
}

impl OperatorMap {
    pub fn operator(&self) -> &BipartiteOperator {
        &self.op
    }
}

impl LinearMap for OperatorMap {
    fn dim_in(&self) -> usize {
        self.op.dim_a()
    }

    fn dim_out(&self) -> usize {
        self.op.dim_b()
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let d = self.dim_in();
        check_input(x, d)?;
        // Tr_A[D (Xᵀ⊗1)] = Σ_ij X_ij ⟨i|D|j⟩_A
        let mut out = CMatrix::zeros(self.dim_out(), self.dim_out());
        for i in 0..d {
            for j in 0..d {
                let coeff = x[(i, j)];
                if coeff != linalg::re(0.0) {
                    out += self.op.block(i, j) * coeff;
                }
            }
        }
        Ok(out)
    }
}

/// The map encoded by `D`; inverse of [`jamiolkowski_operator`].
pub fn map_from_operator(d: &BipartiteOperator) -> OperatorMap {
    OperatorMap { op: d.clone() }
}

/// `D = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|) = d (1 ⊗ Λ) P₊` on `C^{d_in} ⊗ C^{d_out}`.
pub fn jamiolkowski_operator<M: LinearMap + ?Sized>(map: &M) -> Result<BipartiteOperator> {
    let (din, dout) = (map.dim_in(), map.dim_out());
    let mut out = CMatrix::zeros(din * dout, din * dout);
    for i in 0..din {
        for j in 0..din {
            let image = map.apply(&linalg::matrix_unit(din, i, j))?;
            out.view_mut((i * dout, j * dout), (dout, dout)).copy_from(&image);
        }
    }
    BipartiteOperator::new(din, dout, out)
}

/// Same as [`jamiolkowski_operator`] but checks the input dimension.
pub fn jamiolkowski_operator_checked<M: LinearMap + ?Sized>(map: &M, d: usize) -> Result<BipartiteOperator> {
    if map.dim_in() != d {
        return Err(Error::DimensionMismatch("map input dimension differs from d"));
    }
    jamiolkowski_operator(map)
}

/// Which factor an extended map acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `Λ ⊗ 1`
    Left,
    /// `1 ⊗ Λ`
    Right,
}

/// `(1 ⊗ Λ)(ρ)` or `(Λ ⊗ 1)(ρ)`, applied block by block.
pub fn apply_extended<M: LinearMap + ?Sized>(
    map: &M,
    rho: &BipartiteOperator,
    side: Side,
) -> Result<BipartiteOperator> {
    match side {
        Side::Right => {
            if map.dim_in() != rho.dim_b() {
                return Err(Error::DimensionMismatch("map does not act on the B factor"));
            }
            let (da, dout) = (rho.dim_a(), map.dim_out());
            let mut out = CMatrix::zeros(da * dout, da * dout);
            for i in 0..da {
                for j in 0..da {
                    let image = map.apply(&rho.block(i, j))?;
                    out.view_mut((i * dout, j * dout), (dout, dout)).copy_from(&image);
                }
            }
            BipartiteOperator::new(da, dout, out)
        }
        Side::Left => {
            if map.dim_in() != rho.dim_a() {
                return Err(Error::DimensionMismatch("map does not act on the A factor"));
            }
            Ok(apply_extended(map, &rho.swap_subsystems(), Side::Right)?.swap_subsystems())
        }
    }
}

/// Two-decomposable map `A ↦ Σ wᵢ Vᵢ Aᵀ Vᵢ†` from weighted Schmidt rank-2 vectors.
///
/// Each vector `ψ` with amplitude matrix `M_ψ` contributes the Kraus operator
/// `√w M_ψ†`, which for `ψ = c₁|a₁b₁⟩ + c₂|a₂b₂⟩` is `√w (c₁|b̄₁⟩⟨a₁| + c₂|b̄₂⟩⟨a₂|)`.
/// The Jamiołkowski operator of the result is exactly `Σ wᵢ |ψᵢ⟩⟨ψᵢ|^{T_B}`
/// with no extra factor of `d`.
pub fn two_decomposable_from_weighted(terms: &[(f64, PureVector)]) -> Result<LinearMapRep> {
    let Some((_, first)) = terms.first() else {
        return Err(Error::BadParameter("at least one vector is required"));
    };
    let dims = first.dims();
    let mut kraus = Vec::with_capacity(terms.len());
    for (w, psi) in terms {
        if psi.dims() != dims {
            return Err(Error::DimensionMismatch("all vectors must live on the same space"));
        }
        if !(*w >= 0.0) {
            return Err(Error::BadParameter("weights must be non-negative"));
        }
        let rank = psi.schmidt_rank(SCHMIDT_RANK_TOL);
        if rank > 2 {
            return Err(Error::SchmidtRankTooHigh { rank, max: 2 });
        }
        kraus.push(psi.amplitude_matrix().adjoint().scale(linalg::sqrt(*w)));
    }
    LinearMapRep::new(kraus, true)
}

/// Unit-weight version of [`two_decomposable_from_weighted`].
pub fn two_decomposable_from_vectors(psis: &[PureVector]) -> Result<LinearMapRep> {
    let terms: Vec<(f64, PureVector)> = psis.iter().cloned().map(|p| (1.0, p)).collect();
    two_decomposable_from_weighted(&terms)
}

/// The completely positive map `S` with `ρ = (1 ⊗ S) P₊`, and `T ∘ S`.
#[derive(Debug, Clone)]
pub struct StateMaps {
    /// Kraus form of `S`, from the spectral decomposition of `d ρ`.
    pub s: LinearMapRep,
    /// `T ∘ S`; its Jamiołkowski operator is `d ρ^{T_B}`.
    pub transpose_s: LinearMapRep,
    /// `S` read directly off `d ρ` via [`map_from_operator`].
    pub s_direct: OperatorMap,
}

/// Builds `S` from a state on `C^d ⊗ C^d`.
///
/// `d ρ = Σ λ_k |v_k⟩⟨v_k|` gives Kraus operators `√λ_k M_{v_k}ᵀ`; transposing
/// the output turns each into `√λ_k M̄_{v_k}ᵀ` behind a transpose.
pub fn s_map_from_state(rho: &DensityMatrix) -> Result<StateMaps> {
    let (da, db) = rho.dims();
    if da != db {
        return Err(Error::DimensionMismatch("S is defined for states on C^d ⊗ C^d"));
    }
    let d = da as f64;
    let scaled = rho.op().scale(d);
    let eig = scaled.eig()?;
    let mut kraus = Vec::new();
    let mut kraus_t = Vec::new();
    for (idx, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 1e-14 {
            continue;
        }
        let v = eig.vectors.column(idx);
        let m = CMatrix::from_fn(da, db, |i, j| v[i * db + j]);
        let k = m.transpose().scale(linalg::sqrt(lambda));
        kraus_t.push(k.map(|z| z.conj()));
        kraus.push(k);
    }
    Ok(StateMaps {
        s: LinearMapRep::new(kraus, false)?,
        transpose_s: LinearMapRep::new(kraus_t, true)?,
        s_direct: map_from_operator(&scaled),
    })
}

/// `(1 ⊗ S)(P₊)`, which should reproduce the state `S` was built from.
pub fn state_from_s<M: LinearMap + ?Sized>(s: &M) -> Result<BipartiteOperator> {
    let d = s.dim_in();
    Ok(jamiolkowski_operator(s)?.scale(1.0 / d as f64))
}

/// Searches for a Schmidt-rank-≤`k` vector on which the Jamiołkowski operator
/// of `map` is negative.
///
/// A `ViolationFound` verdict certifies that the map is not `k`-positive. A
/// `NoViolationFound` verdict is heuristic and never a positivity proof.
pub fn is_k_positive<M: LinearMap + ?Sized>(map: &M, k: usize, params: &SearchParams) -> Result<Verdict> {
    if k == 0 {
        return Err(Error::BadParameter("k must be at least 1"));
    }
    let choi = jamiolkowski_operator(map)?;
    rank_constrained_min(&choi, k, params)
}

/// `Λ(ρ)` min eigenvalue helpers used by screens.
pub fn extended_min_eigenvalue<M: LinearMap + ?Sized>(map: &M, rho: &BipartiteOperator, side: Side) -> Result<f64> {
    apply_extended(map, rho, side)?.min_eigenvalue()
}

/// `ρ^{T_B}` through the extended transpose map.
pub fn partial_transpose_via_map(rho: &BipartiteOperator) -> Result<BipartiteOperator> {
    let out = apply_extended(&LinearMapRep::transpose(rho.dim_b()), rho, Side::Right)?;
    debug_assert!(linalg::max_abs_diff(out.matrix(), rho.partial_transpose(Subsystem::B).matrix()) == 0.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, re};
    use crate::random;
    use crate::states;

    fn random_matrix(seed: u64, n: usize) -> CMatrix {
        random::gaussian_matrix(&mut random::rng_from_seed(seed), n, n)
    }

    #[test]
    fn identity_kraus_is_identity_map() {
        let x = random_matrix(1, 3);
        assert_eq!(LinearMapRep::identity(3).apply(&x).unwrap(), x);
    }

    #[test]
    fn pauli_x_kraus_flips_populations() {
        let x = CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)]);
        let map = LinearMapRep::new(alloc::vec![x], false).unwrap();
        let out = map.apply(&CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(0.0)])).unwrap();
        assert_eq!(out, CMatrix::from_row_slice(2, 2, &[re(0.0), re(0.0), re(0.0), re(1.0)]));
    }

    #[test]
    fn map_is_linear() {
        let map = LinearMapRep::new(alloc::vec![random_matrix(2, 3), random_matrix(3, 3)], true).unwrap();
        let (x, y) = (random_matrix(4, 3), random_matrix(5, 3));
        let (a, b) = (c(0.3, -1.2), c(2.0, 0.5));
        let lhs = map.apply(&(x.clone() * a + y.clone() * b)).unwrap();
        let rhs = map.apply(&x).unwrap() * a + map.apply(&y).unwrap() * b;
        assert!(linalg::max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn rejects_bad_kraus_and_inputs() {
        assert!(LinearMapRep::new(alloc::vec![], false).is_err());
        let bad = LinearMapRep::new(alloc::vec![CMatrix::identity(2, 2), CMatrix::identity(3, 3)], false);
        assert!(bad.is_err());
        assert!(LinearMapRep::identity(2).apply(&CMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn jamiolkowski_of_identity_and_transpose() {
        for d in [2, 3] {
            let id = jamiolkowski_operator(&LinearMapRep::identity(d)).unwrap();
            let p = states::max_entangled(d).unwrap().scale(d as f64);
            assert!(linalg::max_abs_diff(id.matrix(), p.matrix()) < 1e-15);
            let t = jamiolkowski_operator(&LinearMapRep::transpose(d)).unwrap();
            assert_eq!(t, states::flip_operator(d).unwrap());
        }
        assert!(jamiolkowski_operator_checked(&LinearMapRep::identity(2), 3).is_err());
    }

    #[test]
    fn operator_map_inverts_jamiolkowski() {
        for d in [2, 3] {
            let map = map_from_operator(&states::max_entangled(d).unwrap().scale(d as f64));
            for i in 0..d {
                for j in 0..d {
                    let e = linalg::matrix_unit(d, i, j);
                    assert!(linalg::max_abs_diff(&map.apply(&e).unwrap(), &e) < 1e-15);
                }
            }
            let t = map_from_operator(&states::flip_operator(d).unwrap());
            let x = random_matrix(7, d);
            assert!(linalg::max_abs_diff(&t.apply(&x).unwrap(), &x.transpose()) < 1e-15);
        }
    }

    #[test]
    fn reduction_operator_gives_reduction_map() {
        let d = 3;
        let op = BipartiteOperator::identity(d, d).sub(&states::max_entangled(d).unwrap().scale(d as f64)).unwrap();
        let map = map_from_operator(&op);
        let x = random_matrix(8, d);
        let expected = CMatrix::identity(d, d) * x.trace() - &x;
        assert!(linalg::max_abs_diff(&map.apply(&x).unwrap(), &expected) < 1e-11);
    }

    #[test]
    fn extended_identity_and_transpose() {
        let rho = states::random_density(2, 3, 3, 4).unwrap();
        let same = apply_extended(&LinearMapRep::identity(3), rho.op(), Side::Right).unwrap();
        assert!(linalg::max_abs_diff(same.matrix(), rho.matrix()) < 1e-15);
        let pt = partial_transpose_via_map(rho.op()).unwrap();
        assert!(linalg::max_abs_diff(pt.matrix(), rho.partial_transpose().matrix()) < 1e-12);
        let left = apply_extended(&LinearMapRep::transpose(2), rho.op(), Side::Left).unwrap();
        assert!(linalg::max_abs_diff(left.matrix(), rho.op().partial_transpose(Subsystem::A).matrix()) < 1e-12);
        assert!(apply_extended(&LinearMapRep::identity(2), rho.op(), Side::Right).is_err());
    }

    #[test]
    fn adjoint_trace_identity() {
        for pre_transpose in [false, true] {
            let map = LinearMapRep::new(
                alloc::vec![random::gaussian_matrix(&mut random::rng_from_seed(9), 2, 3)],
                pre_transpose,
            )
            .unwrap();
            let adj = map.adjoint();
            assert_eq!((adj.dim_in(), adj.dim_out()), (2, 3));
            for seed in 0..50 {
                let a = random_matrix(100 + seed, 2);
                let b = random_matrix(200 + seed, 3);
                let lhs = (&a * map.apply(&b).unwrap()).trace();
                let rhs = (adj.apply(&a).unwrap() * &b).trace();
                assert!((lhs - rhs).norm() < 1e-11);
            }
            assert_eq!(adj.adjoint(), map);
        }
    }

    #[test]
    fn vector_map_has_rank_two_kraus() {
        let psi = PureVector::from_terms(3, 3, &[(re(1.0), 0, 0), (re(1.0), 1, 1)]).unwrap();
        let map = two_decomposable_from_vectors(std::slice::from_ref(&psi)).unwrap();
        assert_eq!(map.kraus().len(), 1);
        assert_eq!(map.max_kraus_rank(1e-10), 2);
        assert!(map.is_two_decomposable(1e-10));
        assert!(map.adjoint().is_two_decomposable(1e-10));
        let d = jamiolkowski_operator(&map).unwrap();
        let expected = psi.projector().partial_transpose(Subsystem::B);
        assert!(linalg::max_abs_diff(d.matrix(), expected.matrix()) < 1e-12);
    }

    #[test]
    fn rank_three_vector_is_rejected() {
        let psi = PureVector::from_terms(3, 3, &[(re(1.0), 0, 0), (re(1.0), 1, 1), (re(1.0), 2, 2)]).unwrap();
        assert_eq!(two_decomposable_from_vectors(&[psi]).unwrap_err(), Error::SchmidtRankTooHigh { rank: 3, max: 2 });
    }

    #[test]
    fn antisymmetric_vectors_give_half_reduction_map() {
        let d = 3;
        let mut psis = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                psis.push(PureVector::from_terms(d, d, &[(re(1.0), i, j), (re(-1.0), j, i)]).unwrap());
            }
        }
        let map = two_decomposable_from_vectors(&psis).unwrap();
        let x = random_matrix(12, d);
        // normalized vectors carry weight 1/2 relative to |ij⟩ - |ji⟩
        let expected = (CMatrix::identity(d, d) * x.trace() - &x).scale(0.5);
        assert!(linalg::max_abs_diff(&map.apply(&x).unwrap(), &expected) < 1e-12);
    }

    #[test]
    fn s_map_round_trips() {
        let p = states::max_entangled_state(3).unwrap();
        let maps = s_map_from_state(&p).unwrap();
        let x = random_matrix(3, 3);
        assert!(linalg::max_abs_diff(&maps.s.apply(&x).unwrap(), &x) < 1e-12);

        let mixed = states::maximally_mixed(3, 3);
        let maps = s_map_from_state(&mixed).unwrap();
        let expected = CMatrix::identity(3, 3) * (x.trace() / 3.0);
        assert!(linalg::max_abs_diff(&maps.s.apply(&x).unwrap(), &expected) < 1e-12);

        for seed in 0..20 {
            let rho = states::random_density(3, 3, 1 + seed as usize % 9, seed).unwrap();
            let maps = s_map_from_state(&rho).unwrap();
            let back = state_from_s(&maps.s).unwrap();
            assert!(linalg::max_abs_diff(back.matrix(), rho.matrix()) < 1e-10);
            let direct = state_from_s(&maps.s_direct).unwrap();
            assert!(linalg::max_abs_diff(direct.matrix(), rho.matrix()) < 1e-12);
        }
        assert!(s_map_from_state(&states::random_density(2, 3, 2, 1).unwrap()).is_err());
    }

    #[test]
    fn transpose_map_is_not_two_positive() {
        let p = SearchParams { restarts: 16, ..SearchParams::with_seed(5) };
        let verdict = is_k_positive(&LinearMapRep::transpose(3), 2, &p).unwrap();
        assert!(verdict.is_violation());
        assert!((verdict.value + 1.0).abs() < 1e-9);
        let one = is_k_positive(&LinearMapRep::transpose(3), 1, &p).unwrap();
        assert!(!one.is_violation());
    }
}
