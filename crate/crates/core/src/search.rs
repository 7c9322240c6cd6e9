//! Minimization of `⟨ψ|M|ψ⟩` over unit vectors of Schmidt rank at most `k`.
//!
//! Given an isometry `W` onto a `k`-dimensional subspace of the A factor,
//! every vector in `range(W) ⊗ H_B` has Schmidt rank ≤ `k`, so the best such
//! vector is the lowest eigenvector of the compression `(W†⊗1) M (W⊗1)`.
//! The search alternates this exact step between the two factors: the B-side
//! Schmidt vectors of the A-step minimizer fix the next B-side subspace, and
//! vice versa. Each new subspace contains the current minimizer, so the value
//! never increases. Restarts from
//! Haar-random subspaces handle the non-convexity; every restart draws from its
//! own stream `child_seed(seed, index)`, and the best restart (lowest value,
//! lowest index on ties) is reported.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::operator::BipartiteOperator;
use crate::random;
use crate::vector::{PureVector, SCHMIDT_RANK_TOL};

/// Maximum deviation between a certificate's re-evaluated value and the value
/// reported by the optimizer.
pub const CERTIFICATE_TOL: f64 = 1e-10;

const TIE_TOL: f64 = 1e-14;

/// Which factor the search compresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompressSide {
    #[default]
    A,
    /// Whichever factor has the smaller dimension (A on ties).
    Smaller,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop a restart once an iteration improves the value by less than this.
    pub conv_tol: f64,
    /// Values below `-neg_tol` count as violations.
    pub neg_tol: f64,
    pub seed: u64,
    pub side: CompressSide,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self { restarts: 64, max_iters: 200, conv_tol: 1e-10, neg_tol: 1e-9, seed: 0, side: CompressSide::A }
    }
}

impl SearchParams {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn with_restarts(self, restarts: usize) -> Self {
        Self { restarts, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::BadParameter("restarts and max_iters must be positive"));
        }
        if !(self.conv_tol > 0.0) || !(self.neg_tol > 0.0) {
            return Err(Error::BadParameter("tolerances must be positive"));
        }
        if !(self.neg_tol > self.conv_tol) {
            return Err(Error::BadParameter("neg_tol must exceed conv_tol"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    ViolationFound,
    NoViolationFound,
}

/// Outcome of a constrained minimization.
///
/// `ViolationFound` is a certificate: the vector has Schmidt rank ≤
/// `rank_bound` and re-evaluates to a negative value. `NoViolationFound` is
/// only evidence; the search is heuristic.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Lowest `⟨ψ|M|ψ⟩` found.
    pub value: f64,
    /// Minimizing vector; present for violations.
    pub certificate: Option<PureVector>,
    /// `⟨ψ|M|ψ⟩` recomputed from the certificate and the input operator.
    pub certificate_value: Option<f64>,
    /// Set when `value` is negative but not below `-neg_tol`.
    pub warning: bool,
    pub rank_bound: usize,
    pub copies: usize,
    /// Index of the restart that produced `value`.
    pub best_restart: usize,
    pub params: SearchParams,
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        self.kind == VerdictKind::ViolationFound
    }

    /// Re-checks the certificate invariants against `m`.
    pub fn verify(&self, m: &BipartiteOperator) -> bool {
        match self.kind {
            VerdictKind::NoViolationFound => self.value >= -self.params.neg_tol,
            VerdictKind::ViolationFound => {
                let Some(cert) = &self.certificate else { return false };
                let Ok(v) = cert.expectation(m) else { return false };
                self.value < -self.params.neg_tol
                    && (v - self.value).abs() <= CERTIFICATE_TOL
                    && cert.schmidt_rank(SCHMIDT_RANK_TOL) <= self.rank_bound
            }
        }
    }
}

struct RestartOutcome {
    value: f64,
    vector: CVector,
}

/// Lowest eigenpair of `M` restricted to `range(W) ⊗ H_B` (or `H_A ⊗ range(W)`
/// when `b_side`), returned as a full-space vector.
fn compressed_min(m: &CMatrix, w: &CMatrix, dim_a: usize, dim_b: usize, b_side: bool) -> (f64, CVector) {
    let lift = if b_side {
        linalg::kron(&CMatrix::identity(dim_a, dim_a), w)
    } else {
        linalg::kron(w, &CMatrix::identity(dim_b, dim_b))
    };
    let small = linalg::hermitian_part(&(lift.adjoint() * m * &lift));
    let eig = linalg::herm_eig_unchecked(&small);
    (eig.min_value(), lift * eig.min_vector())
}

/// Top-`k` Schmidt vectors of `psi` on one side, as the columns of an isometry.
fn schmidt_subspace(psi: &CVector, dim_a: usize, dim_b: usize, k: usize, b_side: bool) -> CMatrix {
    let amps = CMatrix::from_fn(dim_a, dim_b, |i, j| psi[i * dim_b + j]);
    let svd = amps.svd(!b_side, b_side);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let cols: Vec<CVector> = if b_side {
        let v_t = svd.v_t.expect("right singular vectors requested");
        order.iter().take(k).map(|&c| v_t.row(c).transpose()).collect()
    } else {
        let u = svd.u.expect("left singular vectors requested");
        order.iter().take(k).map(|&c| u.column(c).into_owned()).collect()
    };
    linalg::columns_to_matrix(&cols)
}

fn run_restart(m: &CMatrix, dim_a: usize, dim_b: usize, k: usize, p: &SearchParams, index: usize) -> RestartOutcome {
    let mut rng = random::rng_from_seed(random::child_seed(p.seed, index as u64));
    let mut w_a = random::random_isometry(&mut rng, dim_a, k);
    let mut best = RestartOutcome { value: f64::INFINITY, vector: CVector::zeros(dim_a * dim_b) };
    for _ in 0..p.max_iters {
        let previous = best.value;
        // A-side subspace fixed, then B-side subspace fixed
        let (value, psi) = compressed_min(m, &w_a, dim_a, dim_b, false);
        if value < best.value {
            best = RestartOutcome { value, vector: psi.clone() };
        }
        let w_b = schmidt_subspace(&psi, dim_a, dim_b, k, true);
        let (value, psi) = compressed_min(m, &w_b, dim_a, dim_b, true);
        if value < best.value {
            best = RestartOutcome { value, vector: psi.clone() };
        }
        let improvement = previous - best.value;
        if improvement.is_finite() && improvement < p.conv_tol {
            break;
        }
        w_a = schmidt_subspace(&psi, dim_a, dim_b, k, false);
    }
    best
}

#[cfg(feature = "parallel")]
fn run_restarts(m: &CMatrix, dim_a: usize, dim_b: usize, k: usize, p: &SearchParams) -> Vec<RestartOutcome> {
    use rayon::prelude::*;
    (0..p.restarts).into_par_iter().map(|i| run_restart(m, dim_a, dim_b, k, p, i)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_restarts(m: &CMatrix, dim_a: usize, dim_b: usize, k: usize, p: &SearchParams) -> Vec<RestartOutcome> {
    (0..p.restarts).map(|i| run_restart(m, dim_a, dim_b, k, p, i)).collect()
}

/// Heuristic minimum of `⟨ψ|M|ψ⟩` over unit `ψ` with Schmidt rank ≤ `k`.
///
/// When `k ≥ min(dim_a, dim_b)` the constraint is vacuous and the result is
/// the exact lowest eigenpair.
pub fn rank_constrained_min(m: &BipartiteOperator, k: usize, p: &SearchParams) -> Result<Verdict> {
    p.validate()?;
    if k == 0 {
        return Err(Error::BadParameter("Schmidt rank bound must be at least 1"));
    }
    let defect = m.hermitian_defect();
    if !(defect <= linalg::HERMITIAN_TOL) {
        return Err(Error::NotHermitian(defect));
    }
    let swap = p.side == CompressSide::Smaller && m.dim_b() < m.dim_a();
    let work = if swap { m.swap_subsystems() } else { m.clone() };
    let (da, db) = work.dims();
    let herm = linalg::hermitian_part(work.matrix());

    let (value, vector, best_restart) = if k >= da.min(db) {
        let eig = linalg::herm_eig_unchecked(&herm);
        (eig.min_value(), eig.min_vector(), 0)
    } else {
        // the search is scale invariant; normalizing keeps conv_tol relative
        let scale = linalg::max_abs(&herm);
        if scale == 0.0 {
            let mut e = CVector::zeros(da * db);
            e[0] = linalg::re(1.0);
            (0.0, e, 0)
        } else {
            let normalized = herm.unscale(scale);
            let outcomes = run_restarts(&normalized, da, db, k, p);
            let mut best_index = 0;
            for (i, o) in outcomes.iter().enumerate().skip(1) {
                if o.value < outcomes[best_index].value - TIE_TOL {
                    best_index = i;
                }
            }
            let best = &outcomes[best_index];
            (best.value * scale, best.vector.clone(), best_index)
        }
    };

    let mut cert = PureVector::new(da, db, vector)?;
    if swap {
        cert = PureVector::from_amplitude_matrix(&cert.amplitude_matrix().transpose())?;
    }
    let cert_value = cert.expectation(m)?;
    let violation = value < -p.neg_tol;
    Ok(Verdict {
        kind: if violation { VerdictKind::ViolationFound } else { VerdictKind::NoViolationFound },
        value,
        certificate_value: violation.then_some(cert_value),
        certificate: violation.then_some(cert),
        warning: !violation && value < 0.0,
        rank_bound: k,
        copies: 1,
        best_restart,
        params: *p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    fn quick() -> SearchParams {
        SearchParams { restarts: 16, ..SearchParams::with_seed(1) }
    }

    #[test]
    fn flip_operator_rank_two_minimum() {
        let v = states::flip_operator(3).unwrap();
        let verdict = rank_constrained_min(&v, 2, &quick()).unwrap();
        assert!((verdict.value + 1.0).abs() < 1e-9, "{}", verdict.value);
        assert!(verdict.is_violation());
        assert!(verdict.verify(&v));
    }

    #[test]
    fn vacuous_constraint_matches_eigensolver() {
        let rho = states::random_density(3, 3, 4, 9).unwrap();
        let pt = rho.partial_transpose();
        let verdict = rank_constrained_min(&pt, 3, &quick()).unwrap();
        assert!((verdict.value - pt.min_eigenvalue().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_params() {
        let mut m = CMatrix::identity(4, 4);
        m[(0, 1)] = linalg::re(1.0);
        let op = BipartiteOperator::new(2, 2, m).unwrap();
        assert!(matches!(rank_constrained_min(&op, 1, &quick()), Err(Error::NotHermitian(_))));
        let id = BipartiteOperator::identity(2, 2);
        assert!(rank_constrained_min(&id, 0, &quick()).is_err());
        let bad = SearchParams { neg_tol: 1e-12, ..quick() };
        assert!(rank_constrained_min(&id, 1, &bad).is_err());
    }

    #[test]
    fn same_seed_same_result() {
        let rho = states::random_density(3, 3, 2, 4).unwrap();
        let pt = rho.partial_transpose();
        let a = rank_constrained_min(&pt, 2, &quick()).unwrap();
        let b = rank_constrained_min(&pt, 2, &quick()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn smaller_side_compression_agrees() {
        let rho = states::random_density(3, 2, 2, 8).unwrap();
        let pt = rho.partial_transpose();
        let a = rank_constrained_min(&pt, 1, &quick()).unwrap();
        let b = rank_constrained_min(&pt, 1, &SearchParams { side: CompressSide::Smaller, ..quick() }).unwrap();
        assert!((a.value - b.value).abs() < 1e-8, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn product_vectors_on_positive_operator() {
        let id = BipartiteOperator::identity(3, 3);
        let verdict = rank_constrained_min(&id, 1, &quick()).unwrap();
        assert_eq!(verdict.kind, VerdictKind::NoViolationFound);
        assert!((verdict.value - 1.0).abs() < 1e-12);
        assert!(verdict.certificate.is_none());
    }
}
