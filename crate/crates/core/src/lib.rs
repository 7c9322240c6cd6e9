//! Numerical core of `qdistill`.
//!
//! Decides one-copy and n-copy distillability of bipartite states through
//! Schmidt-rank-2 witnesses and the positive maps associated with them.
//!
//! The crate is `no_std` (it needs `alloc`). Enabling `std` adds error trait
//! integration; `parallel` runs search restarts on a rayon pool.
//!
//! ```
//! use qdistill_core::{one_distillable, states, SearchParams};
//!
//! let rho = states::werner(3, -0.8)?;
//! let verdict = one_distillable(&rho, &SearchParams::with_seed(1))?;
//! let psi = verdict.certificate.as_ref().expect("distillable Werner state");
//! assert!(psi.schmidt_rank(1e-9) <= 2);
//! assert!(psi.expectation(&rho.partial_transpose())? < 0.0);
//! # Ok::<(), qdistill_core::Error>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod linalg;
pub mod operator;
pub mod random;
pub mod states;
pub mod vector;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use operator::{BipartiteOperator, Subsystem};
pub use states::DensityMatrix;
pub use vector::{PureVector, SchmidtForm};
pub mod search;
pub use search::{rank_constrained_min, SearchParams, Verdict, VerdictKind};
pub mod maps;
pub use maps::{LinearMap, LinearMapRep, Side};
pub mod witness;
pub use witness::{named_map, witness_from_vector, NamedMap, Witness};
pub mod distill;
pub use distill::{n_distillable, one_distillable};
