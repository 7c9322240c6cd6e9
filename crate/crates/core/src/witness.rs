//! Distillation witnesses `D = Σ wᵢ |ψᵢ⟩⟨ψᵢ|^{T_B}` and the named maps built from them.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, re, CMatrix};
use crate::maps::{self, LinearMap, LinearMapRep};
use crate::operator::{BipartiteOperator, Subsystem};
use crate::states;
use crate::vector::{PureVector, SCHMIDT_RANK_TOL};

/// The five closed-form detection maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedMap {
    /// Reduction map `Tr(A) 1 - A`.
    Lambda1,
    /// `Tr(A) 1 + A - 2 diag(A)`.
    Lambda2,
    /// `Aᵀ + (d - 2) diag(A)`.
    Lambda3,
    /// `-Aᵀ + d diag(A)`.
    Lambda4,
    /// `(d - 2) Tr(A) 1 + (2d - 1) Aᵀ`.
    Lambda5,
}

impl NamedMap {
    pub const ALL: [NamedMap; 5] = [Self::Lambda1, Self::Lambda2, Self::Lambda3, Self::Lambda4, Self::Lambda5];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Lambda1 => "lambda1",
            Self::Lambda2 => "lambda2",
            Self::Lambda3 => "lambda3",
            Self::Lambda4 => "lambda4",
            Self::Lambda5 => "lambda5",
        }
    }

    /// Integer coefficients of the unnormalized Schmidt rank-2 vectors whose
    /// projectors sum to `D^{T_B}`, as `(coefficient, i, j)` terms of `|ij⟩`.
    ///
    /// `None` for `Lambda5`, whose rank-2 decomposition is not constructed.
    pub fn rank2_family(self, d: usize) -> Option<Vec<[(i64, usize, usize); 2]>> {
        let sign: i64 = match self {
            Self::Lambda1 | Self::Lambda4 => -1,
            Self::Lambda2 | Self::Lambda3 => 1,
            Self::Lambda5 => return None,
        };
        let mut out = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                out.push(match self {
                    Self::Lambda1 | Self::Lambda2 => [(1, i, j), (sign, j, i)],
                    _ => [(1, i, i), (sign, j, j)],
                });
            }
        }
        Some(out)
    }
}

impl fmt::Display for NamedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for NamedMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|m| m.tag() == lower)
            .ok_or(Error::BadParameter("unknown map name (expected lambda1..lambda5)"))
    }
}

/// Where a witness came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// `D = Σ wᵢ |ψᵢ⟩⟨ψᵢ|^{T_B}`
    Vectors(Vec<(f64, PureVector)>),
    Named {
        map: NamedMap,
        d: usize,
    },
}

/// A distillation witness `D`: `Tr(D ρ) < 0` certifies one-distillability.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub op: BipartiteOperator,
    pub provenance: Provenance,
}

impl Witness {
    /// Builds `Σ wᵢ |ψᵢ⟩⟨ψᵢ|^{T_B}`; every vector must have Schmidt rank ≤ 2.
    pub fn from_weighted(terms: Vec<(f64, PureVector)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::BadParameter("at least one vector is required"));
        };
        let (da, db) = first.dims();
        let mut sum = BipartiteOperator::zeros(da, db);
        for (w, psi) in &terms {
            let rank = psi.schmidt_rank(SCHMIDT_RANK_TOL);
            if rank > 2 {
                return Err(Error::SchmidtRankTooHigh { rank, max: 2 });
            }
            if !(*w >= 0.0) {
                return Err(Error::BadParameter("weights must be non-negative"));
            }
            sum = sum.add(&psi.projector().scale(*w))?;
        }
        Ok(Self { op: sum.partial_transpose(Subsystem::B), provenance: Provenance::Vectors(terms) })
    }

    /// `Tr(D ρ)`
    pub fn value(&self, rho: &BipartiteOperator) -> Result<f64> {
        Ok(self.op.trace_with(rho)?.re)
    }

    /// The two-decomposable map whose Jamiołkowski operator is `D`, if the
    /// witness was built from vectors.
    pub fn map(&self) -> Option<Result<LinearMapRep>> {
        match &self.provenance {
            Provenance::Vectors(terms) => Some(maps::two_decomposable_from_weighted(terms)),
            Provenance::Named { .. } => None,
        }
    }
}

/// `D = |ψ⟩⟨ψ|^{T_B}` (no factor of `d`).
pub fn witness_from_vector(psi: &PureVector) -> Result<Witness> {
    Witness::from_weighted(alloc::vec![(1.0, psi.clone())])
}

/// Closed-form action of a named map at dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedFormMap {
    pub map: NamedMap,
    pub d: usize,
}

impl LinearMap for ClosedFormMap {
    fn dim_in(&self) -> usize {
        self.d
    }

    fn dim_out(&self) -> usize {
        self.d
    }

    fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        let d = self.d;
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch("map input has the wrong size"));
        }
        let df = d as f64;
        let id = CMatrix::identity(d, d);
        let diag = CMatrix::from_diagonal(&a.diagonal());
        let tr = a.trace();
        Ok(match self.map {
            NamedMap::Lambda1 => id * tr - a,
            NamedMap::Lambda2 => id * tr + a - diag.scale(2.0),
            NamedMap::Lambda3 => a.transpose() + diag.scale(df - 2.0),
            NamedMap::Lambda4 => -a.transpose() + diag.scale(df),
            NamedMap::Lambda5 => id * (tr * (df - 2.0)) + a.transpose().scale(2.0 * df - 1.0),
        })
    }
}

/// Closed-form witness `D` of a named map.
pub fn named_witness_operator(map: NamedMap, d: usize) -> Result<BipartiteOperator> {
    let df = d as f64;
    let id = BipartiteOperator::identity(d, d);
    let dp = states::max_entangled(d)?.scale(df);
    let v = states::flip_operator(d)?;
    let z = states::diag_projector_z(d)?;
    match map {
        NamedMap::Lambda1 => id.sub(&dp),
        NamedMap::Lambda2 => id.add(&dp)?.sub(&z.scale(2.0)),
        NamedMap::Lambda3 => v.add(&z.scale(df - 2.0)),
        NamedMap::Lambda4 => z.scale(df).sub(&v),
        NamedMap::Lambda5 => id.scale(df - 2.0).add(&v.scale(2.0 * df - 1.0)),
    }
}

/// Everything known about one named map at one dimension.
#[derive(Debug, Clone)]
pub struct NamedMapBundle {
    pub map: NamedMap,
    pub d: usize,
    /// Transpose-composed Kraus form. For `Lambda1`..`Lambda4` every Kraus
    /// operator has rank 2; `Lambda5` uses `√(d-2) |i⟩⟨j|` and `√(2d-1) 1`.
    pub kraus: LinearMapRep,
    pub closed_form: ClosedFormMap,
    /// The closed-form `D` with named provenance.
    pub witness: Witness,
    /// Weighted normalized vectors with `Σ wᵢ |ψᵢ⟩⟨ψᵢ| = D^{T_B}` (`Lambda1`..`Lambda4`).
    pub rank2_terms: Option<Vec<(f64, PureVector)>>,
}

fn family_vectors(map: NamedMap, d: usize) -> Result<Option<Vec<(f64, PureVector)>>> {
    let Some(family) = map.rank2_family(d) else { return Ok(None) };
    let mut out = Vec::with_capacity(family.len());
    for terms in family {
        let coeffs = terms.map(|(c, i, j)| (re(c as f64), i, j));
        let norm2: i64 = terms.iter().map(|(c, _, _)| c * c).sum();
        out.push((norm2 as f64, PureVector::from_terms(d, d, &coeffs)?));
    }
    Ok(Some(out))
}

/// Builds the Kraus form, closed form and witness of a named map.
pub fn named_map(map: NamedMap, d: usize) -> Result<NamedMapBundle> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let rank2_terms = family_vectors(map, d)?;
    let kraus = match &rank2_terms {
        Some(terms) => maps::two_decomposable_from_weighted(terms)?,
        None => {
            let df = d as f64;
            let mut kraus = Vec::new();
            if d > 2 {
                let w = linalg::sqrt(df - 2.0);
                for i in 0..d {
                    for j in 0..d {
                        kraus.push(linalg::matrix_unit(d, i, j).scale(w));
                    }
                }
            }
            kraus.push(CMatrix::identity(d, d).scale(linalg::sqrt(2.0 * df - 1.0)));
            LinearMapRep::new(kraus, true)?
        }
    };
    Ok(NamedMapBundle {
        map,
        d,
        kraus,
        closed_form: ClosedFormMap { map, d },
        witness: Witness { op: named_witness_operator(map, d)?, provenance: Provenance::Named { map, d } },
        rank2_terms,
    })
}

/// Integer matrix on `C^d ⊗ C^d`, used for exact identity checks.
pub type IntMatrix = DMatrix<i64>;

/// `Σ |ψ⟩⟨ψ|` over the integer vectors of [`NamedMap::rank2_family`].
pub fn integer_family_sum(map: NamedMap, d: usize) -> Option<IntMatrix> {
    let family = map.rank2_family(d)?;
    let mut sum = IntMatrix::zeros(d * d, d * d);
    for terms in family {
        for &(c1, i1, j1) in &terms {
            for &(c2, i2, j2) in &terms {
                sum[(i1 * d + j1, i2 * d + j2)] += c1 * c2;
            }
        }
    }
    Some(sum)
}

/// The closed form of `D^{T_B}` in integer arithmetic, built from `1`, `V`,
/// `d P₊ = Σ|ii⟩⟨jj|` and `Z`.
pub fn integer_closed_form_pt(map: NamedMap, d: usize) -> IntMatrix {
    let n = d * d;
    let di = d as i64;
    let id = IntMatrix::identity(n, n);
    let v = IntMatrix::from_fn(n, n, |r, c| ((r / d == c % d) && (r % d == c / d)) as i64);
    let dp = IntMatrix::from_fn(n, n, |r, c| ((r / d == r % d) && (c / d == c % d)) as i64);
    let z = IntMatrix::from_fn(n, n, |r, c| (r == c && r / d == r % d) as i64);
    match map {
        NamedMap::Lambda1 => id - v,
        NamedMap::Lambda2 => id + v - z * 2,
        NamedMap::Lambda3 => dp + z * (di - 2),
        NamedMap::Lambda4 => z * di - dp,
        NamedMap::Lambda5 => id * (di - 2) + dp * (2 * di - 1),
    }
}

/// Converts an integer matrix into a bipartite operator on `C^d ⊗ C^d`.
pub fn int_to_operator(m: &IntMatrix, d: usize) -> Result<BipartiteOperator> {
    BipartiteOperator::new(d, d, m.map(|x| re(x as f64)))
}
