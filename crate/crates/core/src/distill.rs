//! One- and n-copy distillability queries and the identities around them.
//!
//! A state is one-distillable exactly when some Schmidt rank-2 vector `ψ` has
//! `⟨ψ|ρ^{T_B}|ψ⟩ < 0`. Everything here either searches for such a vector or
//! translates between that vector and the two-decomposable map it defines.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::maps::{self, LinearMap, LinearMapRep, Side};
use crate::operator::{self, BipartiteOperator, Subsystem};
use crate::random::{self, Rng};
use crate::search::{rank_constrained_min, SearchParams, Verdict, VerdictKind};
use crate::states::{self, DensityMatrix};
use crate::vector::PureVector;
use crate::witness::{self, ClosedFormMap, NamedMap, Witness};

/// Residual allowed between `(ρ^{⊗n})^{T_B}` and the regrouped `(ρ^{T_B})^{⊗n}`.
pub const PT_POWER_TOL: f64 = 1e-10;

/// Searches for a Schmidt rank-2 vector with `⟨ψ|ρ^{T_B}|ψ⟩ < 0`.
pub fn one_distillable(rho: &DensityMatrix, p: &SearchParams) -> Result<Verdict> {
    rank_constrained_min(&rho.partial_transpose(), 2, p)
}

/// [`one_distillable`] on `ρ^{⊗n}`, regrouped to `A^{⊗n} ⊗ B^{⊗n}`.
///
/// # Panics
///
/// If the partial transpose of the regrouped power disagrees with the
/// regrouped power of the partial transpose beyond [`PT_POWER_TOL`].
pub fn n_distillable(rho: &DensityMatrix, n: usize, p: &SearchParams) -> Result<Verdict> {
    if n == 1 {
        return one_distillable(rho, p);
    }
    let power = states::tensor_power(rho, n)?;
    let pt = power.partial_transpose();
    let pt_power = states::operator_power(&rho.partial_transpose(), n, usize::MAX)?;
    let residual = linalg::max_abs_diff(pt.matrix(), pt_power.matrix());
    assert!(residual <= PT_POWER_TOL, "partial transpose does not commute with the tensor power: {residual:e}");
    let mut verdict = rank_constrained_min(&pt, 2, p)?;
    verdict.copies = n;
    Ok(verdict)
}

/// The basis product vector `|ij⟩` maximizing `⟨ij|ρ^{T_B}|ij⟩ = ⟨ij|ρ|ij⟩`.
pub fn best_product_basis_vector(rho: &DensityMatrix) -> (PureVector, f64) {
    let (da, db) = rho.dims();
    let mut best = (0, rho.matrix()[(0, 0)].re);
    for idx in 1..da * db {
        let v = rho.matrix()[(idx, idx)].re;
        if v > best.1 {
            best = (idx, v);
        }
    }
    let mut amps = CVector::zeros(da * db);
    amps[best.0] = linalg::re(1.0);
    (PureVector::new(da, db, amps).expect("basis vector"), best.1)
}

/// Extends a one-copy certificate `ψ` to `n` copies as `ψ ⊗ φ^{⊗(n-1)}` with
/// a product vector `φ`, regrouped to `A^{⊗n} ⊗ B^{⊗n}`.
///
/// Returns the vector and its value `⟨ψ|ρ^{T_B}|ψ⟩ · ⟨φ|ρ^{T_B}|φ⟩^{n-1}`,
/// evaluated on the regrouped `(ρ^{⊗n})^{T_B}`.
pub fn extend_certificate(rho: &DensityMatrix, cert: &PureVector, n: usize) -> Result<(PureVector, f64)> {
    if cert.dims() != rho.dims() {
        return Err(Error::DimensionMismatch("certificate and state live on different spaces"));
    }
    if n == 0 {
        return Err(Error::BadParameter("number of copies must be at least 1"));
    }
    let (da, db) = rho.dims();
    let (phi, _) = best_product_basis_vector(rho);
    let mut pair = cert.amplitudes().clone();
    for _ in 1..n {
        pair = linalg::kron_vec(&pair, phi.amplitudes());
    }
    let grouped = operator::permute_vector_to_bipartite(&pair, da, db, n)?;
    let v = PureVector::new(da.pow(n as u32), db.pow(n as u32), grouped)?;
    let pt = states::tensor_power(rho, n)?.partial_transpose();
    let value = v.expectation(&pt)?;
    Ok((v, value))
}

fn projector_basis(p: &CMatrix, dim: usize) -> Result<CMatrix> {
    if p.nrows() != dim || p.ncols() != dim {
        return Err(Error::DimensionMismatch("projector does not fit its factor"));
    }
    let defect = linalg::max_abs_diff(&(p * p), p).max(linalg::hermitian_defect(p));
    if defect > 1e-9 {
        return Err(Error::NotProjector(defect));
    }
    let eig = linalg::herm_eig(p)?;
    let rank = eig.values.iter().filter(|&&v| v > 0.5).count();
    if rank != 2 {
        return Err(Error::WrongRank(rank));
    }
    Ok(eig.vectors.columns(dim - 2, 2).into_owned())
}

/// `(P ⊗ Q) ρ (P ⊗ Q)` expressed as an (unnormalized) operator on `C² ⊗ C²`.
pub fn compress_to_qubits(rho: &BipartiteOperator, p: &CMatrix, q: &CMatrix) -> Result<BipartiteOperator> {
    let up = projector_basis(p, rho.dim_a())?;
    let uq = projector_basis(q, rho.dim_b())?;
    let iso = linalg::kron(&up, &uq);
    BipartiteOperator::new(2, 2, iso.adjoint() * rho.matrix() * iso)
}

/// Lowest eigenvalue of the partial transpose of `ρ' = (P⊗Q) ρ (P⊗Q)`.
///
/// `ρ'` is not renormalized; negative values certify that `ρ'` is entangled.
pub fn projector_test(rho: &BipartiteOperator, p: &CMatrix, q: &CMatrix) -> Result<f64> {
    compress_to_qubits(rho, p, q)?.partial_transpose(Subsystem::B).min_eigenvalue()
}

/// Random rank-2 projector on `C^dim`.
pub fn random_rank2_projector(rng: &mut Rng, dim: usize) -> CMatrix {
    let w = random::random_isometry(rng, dim, 2);
    &w * w.adjoint()
}

/// Both sides of the two-positivity reformulation.
#[derive(Debug, Clone)]
pub struct TwoPositivityReport {
    /// Rank-2 search on `ρ^{T_B}`.
    pub one_copy: Verdict,
    /// Rank-2 search on the Jamiołkowski operator of `T ∘ S`, i.e. `d ρ^{T_B}`.
    pub two_positivity: Verdict,
    /// `two_positivity.value / one_copy.value`, expected to be `d`.
    pub ratio: f64,
    pub kinds_agree: bool,
    /// `max |Choi(T∘S) - d ρ^{T_B}|`
    pub choi_residual: f64,
}

/// Runs the one-distillability search and the two-positivity test of `T ∘ S`
/// side by side with the same search parameters.
pub fn two_positivity_crosscheck(rho: &DensityMatrix, p: &SearchParams) -> Result<TwoPositivityReport> {
    let (d, db) = rho.dims();
    if d != db {
        return Err(Error::DimensionMismatch("the two-positivity check needs d_A = d_B"));
    }
    let one_copy = one_distillable(rho, p)?;
    let s = maps::s_map_from_state(rho)?;
    let choi = maps::jamiolkowski_operator(&s.transpose_s)?;
    let expected = rho.partial_transpose().scale(d as f64);
    let choi_residual = linalg::max_abs_diff(choi.matrix(), expected.matrix());
    let mut two_positivity = maps::is_k_positive(&s.transpose_s, 2, p)?;
    two_positivity.copies = 1;
    Ok(TwoPositivityReport {
        ratio: two_positivity.value / one_copy.value,
        kinds_agree: one_copy.kind == two_positivity.kind,
        one_copy,
        two_positivity,
        choi_residual,
    })
}

/// `(A ⊗ 1) ρ (A† ⊗ 1) / p` with `p = Tr[(A†A ⊗ 1) ρ]`.
pub fn filter_state(rho: &DensityMatrix, a: &CMatrix) -> Result<DensityMatrix> {
    if a.ncols() != rho.dims().0 {
        return Err(Error::DimensionMismatch("filter does not act on the A factor"));
    }
    let out = rho.op().sandwich_a(a, &a.adjoint())?;
    let prob = out.trace().re;
    if !(prob > 1e-12) {
        return Err(Error::ZeroProbability(prob));
    }
    let op = BipartiteOperator::new(out.dim_a(), out.dim_b(), linalg::hermitian_part(out.matrix()).unscale(prob))?;
    Ok(DensityMatrix::new_unchecked(op))
}

/// `Tr[(A ⊗ 1) D (A† ⊗ 1) ρ]`
pub fn witness_class_value(w: &Witness, a: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    let d = &w.op;
    if a.nrows() != d.dim_a() || a.ncols() != d.dim_a() {
        return Err(Error::DimensionMismatch("filter does not act on the witness A factor"));
    }
    let transformed = d.sandwich_a(a, &a.adjoint())?;
    Ok(transformed.trace_with(rho.op())?.re)
}

/// The local operator `A` with `(A ⊗ 1) Σ_i |ii⟩ = φ`, i.e. the amplitude
/// matrix of `φ` (which must live on `C^d ⊗ C^d`).
pub fn filter_from_vector(phi: &PureVector) -> Result<CMatrix> {
    let (da, db) = phi.dims();
    if da != db {
        return Err(Error::DimensionMismatch("vector must live on C^d ⊗ C^d"));
    }
    Ok(phi.amplitude_matrix())
}

/// Turns a vector `φ` with `⟨φ|(1 ⊗ Λ)(ρ)|φ⟩ < 0` for a transpose-composed map
/// `Λ(X) = Σ Vᵢ Xᵀ Vᵢ†` into the vectors `(1 ⊗ Vᵢ†)φ`, each of Schmidt rank
/// ≤ rank(Vᵢ), and returns the one with the lowest `⟨φ'|ρ^{T_B}|φ'⟩`.
///
/// The returned value is for the normalized vector. The unnormalized values
/// sum to `⟨φ|(1 ⊗ Λ)(ρ)|φ⟩`, so at least one is negative when that is.
pub fn eigenvector_to_witness_vector(
    map: &LinearMapRep,
    rho: &DensityMatrix,
    phi: &CVector,
) -> Result<Option<(PureVector, f64)>> {
    if !map.pre_transpose() {
        return Err(Error::BadParameter("map must be transpose-composed"));
    }
    let (da, db) = rho.dims();
    if map.dim_in() != db || phi.len() != da * map.dim_out() {
        return Err(Error::DimensionMismatch("map or vector does not fit the state"));
    }
    let pt = rho.partial_transpose();
    let mut best: Option<(PureVector, f64)> = None;
    for v in map.kraus() {
        let lifted = linalg::kron(&CMatrix::identity(da, da), &v.adjoint()) * phi;
        if lifted.norm() < 1e-12 {
            continue;
        }
        let cand = PureVector::new(da, db, lifted)?;
        let value = cand.expectation(&pt)?;
        if best.as_ref().map_or(true, |(_, b)| value < *b) {
            best = Some((cand, value));
        }
    }
    Ok(best)
}

/// Certificate → map → negative eigenvalue → certificate, for one state.
#[derive(Debug, Clone)]
pub struct MainTheoremRoundTrip {
    /// `⟨ψ|ρ^{T_B}|ψ⟩` for the input certificate.
    pub witness_value: f64,
    /// `Tr[(1 ⊗ Λ†)(ρ) P₊]` with `Λ` the map of `ψ`; equals `witness_value / d`.
    pub adjoint_pplus_value: f64,
    /// Lowest eigenvalue of `(1 ⊗ Λ†)(ρ)`.
    pub map_min_eigenvalue: f64,
    /// Rank-2 vector recovered from the lowest eigenvector.
    pub recovered: Option<PureVector>,
    /// `⟨φ'|ρ^{T_B}|φ'⟩` of the recovered vector.
    pub recovered_value: f64,
}

/// Runs both directions of the witness/map correspondence for a certificate.
pub fn main_theorem_round_trip(rho: &DensityMatrix, cert: &PureVector) -> Result<MainTheoremRoundTrip> {
    let (da, _) = rho.dims();
    let witness = witness::witness_from_vector(cert)?;
    let witness_value = witness.value(rho.op())?;
    let lambda = maps::two_decomposable_from_vectors(core::slice::from_ref(cert))?;
    let adjoint = lambda.adjoint();
    let image = maps::apply_extended(&adjoint, rho.op(), Side::Right)?;
    let pplus = states::max_entangled(da)?;
    let adjoint_pplus_value = image.trace_with(&pplus)?.re;
    let eig = image.eig()?;
    let recovered = eigenvector_to_witness_vector(&adjoint, rho, &eig.min_vector())?;
    let (recovered, recovered_value) = match recovered {
        Some((v, value)) => (Some(v), value),
        None => (None, f64::INFINITY),
    };
    Ok(MainTheoremRoundTrip {
        witness_value,
        adjoint_pplus_value,
        map_min_eigenvalue: eig.min_value(),
        recovered,
        recovered_value,
    })
}

/// One named map applied to one side of a state.
#[derive(Debug, Clone)]
pub struct ScreenEntry {
    pub map: NamedMap,
    pub side: Side,
    /// Lowest eigenvalue of `(1 ⊗ Λ)(ρ)` or `(Λ ⊗ 1)(ρ)`.
    pub min_eigenvalue: f64,
    /// `Tr(D ρ)` for the map's witness, when `d_A = d_B`.
    pub witness_value: Option<f64>,
    pub flagged: bool,
    /// Rank-2 vector with `⟨ψ|ρ^{T_B}|ψ⟩ < 0` recovered from the negative
    /// eigenvector (maps with rank-2 Kraus operators only).
    pub certificate: Option<(PureVector, f64)>,
}

/// Applies `Λ₁..Λ₅` on both sides; any flagged entry means one-distillable.
pub fn named_map_screen(rho: &DensityMatrix, neg_tol: f64) -> Result<Vec<ScreenEntry>> {
    let (da, db) = rho.dims();
    let swapped = DensityMatrix::new_unchecked(rho.op().swap_subsystems());
    let mut out = Vec::new();
    for map in NamedMap::ALL {
        for side in [Side::Right, Side::Left] {
            let dim = if side == Side::Right { db } else { da };
            if dim < 2 {
                continue;
            }
            let bundle = witness::named_map(map, dim)?;
            let closed = ClosedFormMap { map, d: dim };
            let image = maps::apply_extended(&closed, rho.op(), side)?;
            let eig = image.eig()?;
            let min_eigenvalue = eig.min_value();
            let flagged = min_eigenvalue < -neg_tol;
            let witness_value = if da == db { Some(bundle.witness.value(rho.op())?) } else { None };
            let certificate = if flagged && bundle.rank2_terms.is_some() {
                match side {
                    Side::Right => eigenvector_to_witness_vector(&bundle.kraus, rho, &eig.min_vector())?,
                    Side::Left => {
                        // (Λ⊗1)(ρ) is (1⊗Λ)(swap ρ) read backwards
                        let phi = swap_vector(&eig.min_vector(), da, dim);
                        match eigenvector_to_witness_vector(&bundle.kraus, &swapped, &phi)? {
                            Some((c, _)) => {
                                let back = PureVector::from_amplitude_matrix(&c.amplitude_matrix().transpose())?;
                                let conj = PureVector::new(da, db, back.amplitudes().map(|z| z.conj()))?;
                                let value = conj.expectation(&rho.partial_transpose())?;
                                Some((conj, value))
                            }
                            None => None,
                        }
                    }
                }
            } else {
                None
            };
            out.push(ScreenEntry { map, side, min_eigenvalue, witness_value, flagged, certificate });
        }
    }
    Ok(out)
}

fn swap_vector(v: &CVector, dim_a: usize, dim_b: usize) -> CVector {
    CVector::from_fn(dim_a * dim_b, |idx, _| {
        let (j, i) = (idx / dim_a, idx % dim_a);
        v[i * dim_b + j]
    })
}

/// Numerical check of the two-copy expansion of the reduction map.
#[derive(Debug, Clone)]
pub struct ReductionTwoCopyReport {
    /// `max |(1⊗Λ)(ρ₁⊗ρ₂) - [ρ₁^A⊗1 ⊗ (1⊗Λ)(ρ₂) + (1⊗Λ)(ρ₁) ⊗ ρ₂]|`
    pub residual: f64,
    /// Lowest eigenvalue of `(1⊗Λ₁)(ρᵢ)` for each state.
    pub one_copy_min: [f64; 2],
    /// `⟨ψ₁⊗ψ₂|(1⊗Λ)(ρ₁⊗ρ₂)|ψ₁⊗ψ₂⟩` for the negative eigenvectors `ψᵢ`, when
    /// both one-copy operators have one.
    pub product_value: Option<f64>,
}

/// Verifies `(1⊗Λ)(ρ₁⊗ρ₂) = ρ₁^A⊗1_{B₁} ⊗ (1⊗Λ)(ρ₂) + (1⊗Λ)(ρ₁) ⊗ ρ₂` for the
/// reduction map `Λ`, with the left side computed on `A₁A₂ ⊗ B₁B₂` and the
/// right side assembled pair by pair.
pub fn reduction_two_copy_identity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<ReductionTwoCopyReport> {
    let (da, db) = rho1.dims();
    if rho2.dims() != (da, db) || da != db {
        return Err(Error::DimensionMismatch("both states must live on the same C^d ⊗ C^d"));
    }
    let d = da;
    let pair = linalg::kron(rho1.matrix(), rho2.matrix());
    let grouped = operator::permute_to_bipartite(&pair, d, d, 2)?;
    let lhs = maps::apply_extended(&ClosedFormMap { map: NamedMap::Lambda1, d: d * d }, &grouped, Side::Right)?;

    let one = ClosedFormMap { map: NamedMap::Lambda1, d };
    let img1 = maps::apply_extended(&one, rho1.op(), Side::Right)?;
    let img2 = maps::apply_extended(&one, rho2.op(), Side::Right)?;
    let marginal1 = linalg::kron(&rho1.op().partial_trace(Subsystem::B), &CMatrix::identity(d, d));
    let rhs_pairs = linalg::kron(&marginal1, img2.matrix()) + linalg::kron(img1.matrix(), rho2.matrix());
    let rhs = operator::permute_to_bipartite(&rhs_pairs, d, d, 2)?;
    let residual = linalg::max_abs_diff(lhs.matrix(), rhs.matrix());

    let e1 = img1.eig()?;
    let e2 = img2.eig()?;
    let product_value = if e1.min_value() < 0.0 && e2.min_value() < 0.0 {
        let psi = linalg::kron_vec(&e1.min_vector(), &e2.min_vector());
        let grouped_psi = operator::permute_vector_to_bipartite(&psi, d, d, 2)?;
        Some(lhs.expectation(&grouped_psi)?)
    } else {
        None
    };
    Ok(ReductionTwoCopyReport { residual, one_copy_min: [e1.min_value(), e2.min_value()], product_value })
}

/// Checks on the two-copy reduction witness `D^{T_B} = 1 - V` on `d² ⊗ d²`.
#[derive(Debug, Clone)]
pub struct TwoCopyWitnessReport {
    /// `1 - V_{d²}` regrouped pairwise equals `1⊗1 - V⊗V` exactly.
    pub flip_factorizes: bool,
    /// `1⊗1 - V⊗V = 2 (P_S⊗P_A + P_A⊗P_S)` exactly.
    pub decomposition_exact: bool,
    /// `max |(1⊗1 - V⊗V) - (P_S⊗P_A + P_A⊗P_S)|`: the unscaled sum is half
    /// the witness, so this is nonzero.
    pub unscaled_residual: f64,
    /// Lowest eigenvalue of `P_S⊗P_A + P_A⊗P_S`.
    pub decomposition_min_eigenvalue: f64,
    /// Largest `|⟨ψ₁ψ₂|(ρ^{⊗2})^{T_B}|ψ₁ψ₂⟩ - ⟨ψ₁|ρ^{T_B}|ψ₁⟩⟨ψ₂|ρ^{T_B}|ψ₂⟩|`.
    pub factorization_residual: f64,
    /// Smallest single-pair factor seen on the sampled PPT states.
    pub min_factor: f64,
    pub samples: usize,
}

/// Verifies the pair-separable form of the two-copy reduction witness and the
/// factorization of pair-product witnesses on sampled PPT states.
pub fn two_copy_witness_separability_check(d: usize, samples: usize, seed: u64) -> Result<TwoCopyWitnessReport> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let big = d * d;
    let witness_pt = BipartiteOperator::identity(big, big).sub(&states::flip_operator(big)?)?;
    let pairs = operator::permute_to_pairs(&witness_pt, d, d, 2)?;
    let v = states::flip_operator(d)?;
    let id = CMatrix::identity(big, big);
    let expected = linalg::kron(&id, &id) - linalg::kron(v.matrix(), v.matrix());
    let flip_factorizes = pairs == expected;

    let (ps, pa) = states::sym_antisym(d)?;
    let decomposition = linalg::kron(ps.matrix(), pa.matrix()) + linalg::kron(pa.matrix(), ps.matrix());
    let unscaled_residual = linalg::max_abs_diff(&decomposition, &expected);
    let decomposition = decomposition.scale(2.0);
    let decomposition_exact = decomposition == expected;
    let decomposition_min_eigenvalue = linalg::min_eigenvalue(&decomposition)?;

    let mut rng = random::rng_from_seed(seed);
    let mut factorization_residual: f64 = 0.0;
    let mut min_factor = f64::INFINITY;
    for _ in 0..samples {
        let rho = states::random_ppt_density_with(&mut rng, d, d)?;
        let psi1 = states::random_rank2_vector_with(&mut rng, d, d)?;
        let psi2 = states::random_rank2_vector_with(&mut rng, d, d)?;
        let pt = rho.partial_transpose();
        let f1 = psi1.expectation(&pt)?;
        let f2 = psi2.expectation(&pt)?;
        let joint = linalg::kron_vec(psi1.amplitudes(), psi2.amplitudes());
        let grouped = operator::permute_vector_to_bipartite(&joint, d, d, 2)?;
        let two_pt = states::tensor_power(&rho, 2)?.partial_transpose();
        let value = two_pt.expectation(&grouped)?;
        factorization_residual = factorization_residual.max((value - f1 * f2).abs());
        min_factor = min_factor.min(f1).min(f2);
    }
    Ok(TwoCopyWitnessReport {
        flip_factorizes,
        decomposition_exact,
        unscaled_residual,
        decomposition_min_eigenvalue,
        factorization_residual,
        min_factor,
        samples,
    })
}

/// Lowest value over `count` random rank-2 projector pairs of [`projector_test`].
pub fn random_projector_search(rho: &BipartiteOperator, count: usize, seed: u64) -> Result<f64> {
    let mut rng = random::rng_from_seed(seed);
    let mut best = f64::INFINITY;
    for _ in 0..count {
        let p = random_rank2_projector(&mut rng, rho.dim_a());
        let q = random_rank2_projector(&mut rng, rho.dim_b());
        best = best.min(projector_test(rho, &p, &q)?);
    }
    Ok(best)
}

/// Convenience: `NoViolationFound` verdicts never carry certificates.
pub fn verdict_kind(value: f64, neg_tol: f64) -> VerdictKind {
    if value < -neg_tol {
        VerdictKind::ViolationFound
    } else {
        VerdictKind::NoViolationFound
    }
}
