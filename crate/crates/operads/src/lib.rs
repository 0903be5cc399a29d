//! Exact computation of Sullivan minimal models for differential graded
//! operads over the rationals.
//!
//! The crate is organized bottom-up:
//!
//! - [`scalar`] and [`perm`]: rational scalars and symmetric-group plumbing.
//! - [`qlinalg`]: exact linear algebra (rref, kernels, cohomology of two-step
//!   complexes, sections, equivariant averaging).
//! - [`trees`]: reduced trees, canonical forms and grafting — the basis
//!   combinatorics of free operads.
//! - [`sigma`]: dg Σ-modules and Λ-modules, morphisms, mapping cones and
//!   relative cohomology.
//! - [`operad`]: dg operads, the free operads on generator modules with
//!   trivial arities 0 and 1, principal extensions, unitary
//!   extension/truncation and the built-in operad library.
//! - [`kan`]: the augmented-simplicial structure of an operad with unitary
//!   multiplication and the filling algorithm for compatible face families.
//! - [`sullivan`]: the arity-wise minimal-model algorithm in both flavors,
//!   quasi-isomorphism verification, lifting and section construction.
//!
//! All arithmetic is exact; there are no tolerances anywhere.

pub mod scalar;
pub mod perm;
pub mod qlinalg;
pub mod trees;
pub mod sigma;
pub mod operad;
pub mod kan;
pub mod sullivan;

mod error;

pub use error::{Error, Result};
pub use scalar::Q;
