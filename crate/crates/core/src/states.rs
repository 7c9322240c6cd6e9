//! Standard operators and state families.
//!
//! Family conventions:
//!
//! * Werner: `ρ_α = (1 + α V) / (d² + α d)`, `α ∈ [-1, 1]`; NPT for `α < -1/d`.
//! * Isotropic: `ρ_F = (1 - F)(1 - P₊)/(d² - 1) + F P₊`, `F ∈ [0, 1]`, with
//!   `Tr(ρ_F P₊) = F`.

use crate::error::{Error, Result};
use crate::linalg::{self, re, CMatrix, CVector};
use crate::operator::{permute_to_bipartite, BipartiteOperator, Subsystem};
use crate::random::{self, Rng};
use crate::vector::PureVector;

/// Tolerance for the density matrix invariants (Hermiticity, positivity, trace).
pub const STATE_TOL: f64 = 1e-9;

/// Default cap on the matrix side produced by [`tensor_power`].
pub const DEFAULT_POWER_CAP: usize = 4096;

/// A Hermitian, positive semidefinite, unit-trace bipartite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: BipartiteOperator,
}

impl DensityMatrix {
    /// Validates the state invariants at [`STATE_TOL`].
    pub fn new(op: BipartiteOperator) -> Result<Self> {
        if !op.is_hermitian(STATE_TOL) {
            return Err(Error::InvalidState("not Hermitian"));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState("trace differs from 1"));
        }
        if op.min_eigenvalue()? < -STATE_TOL {
            return Err(Error::InvalidState("negative eigenvalue"));
        }
        Ok(Self { op })
    }

    /// Divides by the trace, then validates.
    pub fn normalized(op: BipartiteOperator) -> Result<Self> {
        let tr = op.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState("trace is not positive"));
        }
        Self::new(op.scale(1.0 / tr))
    }

    pub(crate) fn new_unchecked(op: BipartiteOperator) -> Self {
        Self { op }
    }

    pub fn from_pure(v: &PureVector) -> Self {
        Self { op: v.projector() }
    }

    pub fn op(&self) -> &BipartiteOperator {
        &self.op
    }

    pub fn into_op(self) -> BipartiteOperator {
        self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.op.dims()
    }

    pub fn partial_transpose(&self) -> BipartiteOperator {
        self.op.partial_transpose(Subsystem::B)
    }

    pub fn min_pt_eigenvalue(&self) -> f64 {
        linalg::herm_eig_unchecked(&linalg::hermitian_part(self.partial_transpose().matrix())).min_value()
    }

    pub fn is_ppt(&self, tol: f64) -> bool {
        self.min_pt_eigenvalue() >= -tol
    }

    /// `Tr(ρ X)`, real part.
    pub fn expect(&self, x: &BipartiteOperator) -> Result<f64> {
        Ok(self.op.trace_with(x)?.re)
    }

    /// `p ρ + (1 - p) σ`
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadParameter("mixing weight must lie in [0, 1]"));
        }
        Ok(Self { op: self.op.scale(p).add(&other.op.scale(1.0 - p))? })
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::BadDimension(d))
    } else {
        Ok(())
    }
}

/// `P₊ = (1/d) Σ_ij |ii⟩⟨jj|`
pub fn max_entangled(d: usize) -> Result<BipartiteOperator> {
    check_dim(d)?;
    let mut m = CMatrix::zeros(d * d, d * d);
    let w = re(1.0 / d as f64);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = w;
        }
    }
    BipartiteOperator::new(d, d, m)
}

pub fn max_entangled_state(d: usize) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(max_entangled(d)?))
}

/// The flip `V = Σ_ij |ij⟩⟨ji|`.
pub fn flip_operator(d: usize) -> Result<BipartiteOperator> {
    check_dim(d)?;
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = re(1.0);
        }
    }
    BipartiteOperator::new(d, d, m)
}

/// Projectors onto the symmetric and antisymmetric subspaces, `(1 ± V)/2`.
pub fn sym_antisym(d: usize) -> Result<(BipartiteOperator, BipartiteOperator)> {
    let v = flip_operator(d)?;
    let id = BipartiteOperator::identity(d, d);
    Ok((id.add(&v)?.scale(0.5), id.sub(&v)?.scale(0.5)))
}

/// `Z = Σ_i |ii⟩⟨ii|`
pub fn diag_projector_z(d: usize) -> Result<BipartiteOperator> {
    check_dim(d)?;
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        m[(i * d + i, i * d + i)] = re(1.0);
    }
    BipartiteOperator::new(d, d, m)
}

pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> DensityMatrix {
    DensityMatrix::new_unchecked(BipartiteOperator::identity(dim_a, dim_b).scale(1.0 / (dim_a * dim_b) as f64))
}

/// Werner state `(1 + α V) / (d² + α d)`.
pub fn werner(d: usize, alpha: f64) -> Result<DensityMatrix> {
    check_dim(d)?;
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::BadParameter("Werner parameter must lie in [-1, 1]"));
    }
    let df = d as f64;
    let op = BipartiteOperator::identity(d, d).add(&flip_operator(d)?.scale(alpha))?;
    Ok(DensityMatrix::new_unchecked(op.scale(1.0 / (df * df + alpha * df))))
}

/// Isotropic state with fidelity `F = Tr(ρ P₊)`.
pub fn isotropic(d: usize, fidelity: f64) -> Result<DensityMatrix> {
    check_dim(d)?;
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::BadParameter("isotropic fidelity must lie in [0, 1]"));
    }
    let df = d as f64;
    let p = max_entangled(d)?;
    let rest = BipartiteOperator::identity(d, d).sub(&p)?;
    let op = rest.scale((1.0 - fidelity) / (df * df - 1.0)).add(&p.scale(fidelity))?;
    Ok(DensityMatrix::new_unchecked(op))
}

/// `G G† / Tr(G G†)` with `G` a complex Gaussian `(d_a d_b) × rank` matrix.
pub fn random_density_with(rng: &mut Rng, dim_a: usize, dim_b: usize, rank: usize) -> Result<DensityMatrix> {
    let n = dim_a * dim_b;
    if dim_a == 0 || dim_b == 0 || rank == 0 || rank > n {
        return Err(Error::BadParameter("rank must lie in 1..=dim_a*dim_b"));
    }
    let g = random::gaussian_matrix(rng, n, rank);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = linalg::hermitian_part(&m.unscale(tr));
    Ok(DensityMatrix::new_unchecked(BipartiteOperator::new(dim_a, dim_b, m)?))
}

pub fn random_density(dim_a: usize, dim_b: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(&mut random::rng_from_seed(seed), dim_a, dim_b, rank)
}

/// `c₁|a₁b₁⟩ + c₂|a₂b₂⟩` with Haar-random orthonormal pairs and random
/// positive coefficients.
pub fn random_rank2_vector_with(rng: &mut Rng, dim_a: usize, dim_b: usize) -> Result<PureVector> {
    if dim_a < 2 || dim_b < 2 {
        return Err(Error::BadParameter("Schmidt rank 2 needs both factors of dimension at least 2"));
    }
    let wa = random::random_isometry(rng, dim_a, 2);
    let wb = random::random_isometry(rng, dim_b, 2);
    // keep both coefficients away from zero so the rank is exactly 2
    let theta = (0.05 + 0.9 * random::uniform(rng)) * core::f64::consts::FRAC_PI_2;
    let (s, cth) = (libm_sin(theta), libm_cos(theta));
    let mut amps = linalg::kron_vec(&wa.column(0).into_owned(), &wb.column(0).into_owned()).scale(cth);
    amps += linalg::kron_vec(&wa.column(1).into_owned(), &wb.column(1).into_owned()).scale(s);
    PureVector::new(dim_a, dim_b, amps)
}

pub fn random_rank2_vector(dim_a: usize, dim_b: usize, seed: u64) -> Result<PureVector> {
    random_rank2_vector_with(&mut random::rng_from_seed(seed), dim_a, dim_b)
}

/// Uniformly random unit vector on `C^{dim_a} ⊗ C^{dim_b}`.
pub fn random_pure_with(rng: &mut Rng, dim_a: usize, dim_b: usize) -> Result<PureVector> {
    PureVector::new(dim_a, dim_b, random::random_unit_vector(rng, dim_a * dim_b))
}

fn libm_sin(x: f64) -> f64 {
    num_traits::Float::sin(x)
}

fn libm_cos(x: f64) -> f64 {
    num_traits::Float::cos(x)
}

/// Rejection-samples a PPT state: a random density matrix mixed with the
/// maximally mixed state, kept once its partial transpose is positive.
pub fn random_ppt_density_with(rng: &mut Rng, dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
    let n = dim_a * dim_b;
    for _ in 0..10_000 {
        let rank = 1 + ((random::uniform(rng) * n as f64) as usize).min(n - 1);
        let rho = random_density_with(rng, dim_a, dim_b, rank)?;
        let weight = random::uniform(rng);
        let candidate = rho.mix(&maximally_mixed(dim_a, dim_b), weight)?;
        if candidate.min_pt_eigenvalue() >= 0.0 {
            return Ok(candidate);
        }
    }
    Err(Error::BadParameter("no PPT state found within the rejection budget"))
}

/// `ρ^{⊗n}` regrouped as a state on `A^{⊗n} ⊗ B^{⊗n}`, subject to [`DEFAULT_POWER_CAP`].
pub fn tensor_power(rho: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
    tensor_power_capped(rho, n, DEFAULT_POWER_CAP)
}

pub fn tensor_power_capped(rho: &DensityMatrix, n: usize, cap: usize) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(operator_power(rho.op(), n, cap)?))
}

/// `M^{⊗n}` for any bipartite operator, regrouped to `A^{⊗n} ⊗ B^{⊗n}`.
pub fn operator_power(m: &BipartiteOperator, n: usize, cap: usize) -> Result<BipartiteOperator> {
    if n == 0 {
        return Err(Error::BadParameter("number of copies must be at least 1"));
    }
    let dim = m.dim().checked_pow(n as u32).ok_or(Error::CapExceeded { dim: usize::MAX, cap })?;
    if dim > cap {
        return Err(Error::CapExceeded { dim, cap });
    }
    if n == 1 {
        return Ok(m.clone());
    }
    let mut power = m.matrix().clone();
    for _ in 1..n {
        power = linalg::kron(&power, m.matrix());
    }
    permute_to_bipartite(&power, m.dim_a(), m.dim_b(), n)
}

/// Product vector `|v_A⟩ ⊗ |v_B⟩` helper for tests and certificates.
pub fn product_vector(a: &CVector, b: &CVector) -> Result<PureVector> {
    PureVector::product(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn max_entangled_entries_d2() {
        let p = max_entangled(2).unwrap();
        for r in 0..4 {
            for cidx in 0..4 {
                let want = if [0, 3].contains(&r) && [0, 3].contains(&cidx) { 0.5 } else { 0.0 };
                assert_eq!(p.matrix()[(r, cidx)], re(want));
            }
        }
    }

    #[test]
    fn max_entangled_is_projector() {
        let p = max_entangled(3).unwrap();
        assert!((p.trace().re - 1.0).abs() < EPS);
        assert!(linalg::max_abs_diff(p.mul(&p).unwrap().matrix(), p.matrix()) < EPS);
        let marginal = p.partial_trace(Subsystem::A);
        assert!(linalg::max_abs_diff(&marginal, &CMatrix::identity(3, 3).scale(1.0 / 3.0)) < EPS);
    }

    #[test]
    fn bad_dimensions() {
        assert_eq!(max_entangled(1).unwrap_err(), Error::BadDimension(1));
        assert!(flip_operator(0).is_err());
        assert!(diag_projector_z(1).is_err());
    }

    #[test]
    fn flip_is_scaled_partial_transpose_of_max_entangled() {
        for d in [2, 3] {
            let v = flip_operator(d).unwrap();
            let pt = max_entangled(d).unwrap().partial_transpose(Subsystem::B).scale(d as f64);
            assert!(linalg::max_abs_diff(v.matrix(), pt.matrix()) < EPS);
            assert_eq!(v.trace(), re(d as f64));
            assert!(linalg::max_abs_diff(v.mul(&v).unwrap().matrix(), &CMatrix::identity(d * d, d * d)) < EPS);
        }
    }

    #[test]
    fn flip_swaps_product_vectors() {
        let a = CVector::from_vec(alloc::vec![re(1.0), re(2.0), re(0.0)]);
        let b = CVector::from_vec(alloc::vec![re(0.0), re(-1.0), re(3.0)]);
        let v = flip_operator(3).unwrap();
        let out = v.matrix() * linalg::kron_vec(&a, &b);
        assert_eq!(out, linalg::kron_vec(&b, &a));
    }

    #[test]
    fn symmetric_antisymmetric_projectors() {
        let (ps, pa) = sym_antisym(2).unwrap();
        assert_eq!(linalg::numerical_rank(ps.matrix(), 1e-9), 3);
        assert_eq!(linalg::numerical_rank(pa.matrix(), 1e-9), 1);
        assert!(linalg::max_abs(ps.mul(&pa).unwrap().matrix()) < EPS);
        let (ps3, pa3) = sym_antisym(3).unwrap();
        assert!((pa3.trace().re - 3.0).abs() < EPS);
        assert!((ps3.trace().re - 6.0).abs() < EPS);
        let v = flip_operator(3).unwrap();
        assert_eq!(ps3.sub(&pa3).unwrap(), v);
    }

    #[test]
    fn z_projector() {
        let z = diag_projector_z(2).unwrap();
        let expected: [f64; 4] = [1.0, 0.0, 0.0, 1.0];
        for (i, w) in expected.iter().enumerate() {
            assert_eq!(z.matrix()[(i, i)], re(*w));
        }
        assert_eq!(z.trace(), re(2.0));
        let z3 = diag_projector_z(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut e = CVector::zeros(9);
                e[i * 3 + j] = re(1.0);
                let out = z3.matrix() * &e;
                if i == j {
                    assert_eq!(out, e);
                } else {
                    assert_eq!(out, CVector::zeros(9));
                }
            }
        }
    }

    #[test]
    fn werner_limits() {
        let mixed = werner(3, 0.0).unwrap();
        assert!(linalg::max_abs_diff(mixed.matrix(), maximally_mixed(3, 3).matrix()) < EPS);
        let singlet = werner(2, -1.0).unwrap();
        let (_, pa) = sym_antisym(2).unwrap();
        assert!(linalg::max_abs_diff(singlet.matrix(), pa.matrix()) < EPS);
        assert!(werner(2, 1.5).is_err());
        DensityMatrix::new(werner(3, -0.7).unwrap().into_op()).unwrap();
    }

    #[test]
    fn isotropic_fidelity() {
        let rho = isotropic(3, 0.7).unwrap();
        let p = max_entangled(3).unwrap();
        assert!((rho.expect(&p).unwrap() - 0.7).abs() < EPS);
        let mixed = isotropic(3, 1.0 / 9.0).unwrap();
        assert!(linalg::max_abs_diff(mixed.matrix(), maximally_mixed(3, 3).matrix()) < EPS);
        assert!(isotropic(3, -0.1).is_err());
        DensityMatrix::new(rho.into_op()).unwrap();
    }

    #[test]
    fn reduction_witness_on_isotropic() {
        let d = 3;
        let witness = BipartiteOperator::identity(d, d).sub(&max_entangled(d).unwrap().scale(d as f64)).unwrap();
        for f in [0.0, 0.2, 0.5, 0.9] {
            let rho = isotropic(d, f).unwrap();
            assert!((rho.expect(&witness).unwrap() - (1.0 - 3.0 * f)).abs() < EPS);
        }
    }

    #[test]
    fn random_density_is_valid_and_deterministic() {
        for seed in 0..20 {
            let rho = random_density(2, 3, 1 + (seed as usize % 6), seed).unwrap();
            DensityMatrix::new(rho.clone().into_op()).unwrap();
            assert_eq!(rho, random_density(2, 3, 1 + (seed as usize % 6), seed).unwrap());
        }
        assert!(random_density(2, 2, 5, 0).is_err());
    }

    #[test]
    fn random_rank2_vectors_have_rank_two() {
        for seed in 0..100 {
            let v = random_rank2_vector(3, 3, seed).unwrap();
            assert_eq!(v.schmidt_rank(crate::vector::SCHMIDT_RANK_TOL), 2, "seed {seed}");
        }
    }

    #[test]
    fn tensor_power_basics() {
        let rho = random_density(2, 2, 4, 11).unwrap();
        assert_eq!(tensor_power(&rho, 1).unwrap(), rho);
        let two = tensor_power(&rho, 2).unwrap();
        assert_eq!(two.dims(), (4, 4));
        let mut expected: alloc::vec::Vec<f64> = alloc::vec::Vec::new();
        let single = rho.op().eig().unwrap().values;
        for a in &single {
            for b in &single {
                expected.push(a * b);
            }
        }
        expected.sort_by(f64::total_cmp);
        let got = two.op().eig().unwrap().values;
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-12);
        }
        assert!(matches!(tensor_power(&rho, 7), Err(Error::CapExceeded { .. })));
        assert!(tensor_power(&rho, 0).is_err());
    }

    #[test]
    fn tensor_power_commutes_with_partial_transpose() {
        let rho = random_density(2, 2, 3, 5).unwrap();
        let lhs = tensor_power(&rho, 2).unwrap().partial_transpose();
        let rhs = operator_power(&rho.partial_transpose(), 2, DEFAULT_POWER_CAP).unwrap();
        assert!(linalg::max_abs_diff(lhs.matrix(), rhs.matrix()) < 1e-12);
    }
}
