//! Certificates and solvers for systems of real quadratic forms.
//!
//! The crate decides positive definite combinations of symmetric matrices,
//! produces Yuan-type and S-lemma certificates (or concrete counterexamples),
//! solves homogeneous quadratic programs with two two-sided constraints by
//! Lagrangian duality, and probes joint numerical ranges empirically.

#![allow(clippy::needless_range_loop)]

pub mod basis;
pub mod error;
pub mod hqpb;
pub mod jnr;
pub mod linalg;
pub mod pdcomb;
pub mod random;
pub mod rng;
pub mod slemma;
pub mod soc;
pub mod tolerances;
pub mod yuan;

mod ascent;
mod lp;
mod lsq;

pub use basis::{BasisResult, MatrixSet};
pub use error::{Error, Result};
pub use hqpb::{DualSolution, HqpbInstance, PrimalRecovery};
pub use linalg::{eig_sym, quad_form, restrict, symmetrize, EigenDecomposition, SubspaceCone, SymMatrix};
pub use pdcomb::{PdCombination, PdOutcome, PdSearchReport};
pub use rng::SeedStream;
pub use slemma::{SLemmaCertificate, SLemmaInstance, SLemmaOutcome, Variant};
pub use soc::{KktPointData, SocCertificate, SocOutcome};
pub use tolerances::Tolerances;
pub use yuan::{SimplexWeights, YuanOutcome};
