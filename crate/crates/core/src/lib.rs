//! Rank-one generated (ROG) spectrahedral cones.
//!
//! Decides whether a cone `{X ⪰ 0 : ⟨M, X⟩ ≥ 0 (or = 0), M ∈ 𝓜}` is the convex
//! hull of its rank-one members, builds certificates for either answer, and
//! produces feasible rank-one decompositions for the ROG families.

// negated comparisons send NaN down the failure branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cones;
pub mod decompose;
pub mod error;
pub mod linalg;
pub mod pencil;
pub mod qcqp;
pub mod roots;
pub mod witness;

pub use classify::{Reason, RogCertificate, Verdict};
pub use cones::{ConeSpec, Constraint, Family, MembershipReport, Sense};
pub use decompose::{Atom, Decomposition};
pub use error::{Error, Result};
pub use linalg::{EigDecomp, Subspace, SymMatrix};
pub use pencil::{rng_from_seed, RogRng};
