//! Exact lattice calculus of orthogonally additive (abstract Uryson) operators
//! on finite measure-algebra models.
//!
//! A finite measure space is a list of atoms with positive rational weights.
//! Vectors carry one exact rational coefficient per atom and are ordered
//! coordinatewise, so fragments are support restrictions and finite disjoint
//! decompositions are set partitions of the support. On top of that model the
//! crate provides:
//!
//! * [`lattice`]: spaces, vectors, fragments, partitions, band projections and
//!   dyadic refinement chains;
//! * [`operators`]: the operator interface, concrete operator families and the
//!   brute-force lattice calculus (modulus, join, meet, positive/negative parts);
//! * [`narrowness`]: discrepancy minimisation, the Enflo–Starbird function,
//!   disjoint trees, refinement diagnostics and disjointness-preserving
//!   minorant extraction;
//! * [`rounding`]: certified coefficient rounding and the signed permutation
//!   bound;
//! * [`boolean`]: finite Boolean algebras, map classification and
//!   homomorphism extension.
//!
//! Every scalar is a [`Q`] (arbitrary precision rational); nothing in the crate
//! uses floating point.

pub mod boolean;
pub mod cli;
pub mod error;
pub mod io;
pub mod lattice;
pub mod narrowness;
pub mod operators;
pub mod random;
pub mod rounding;
pub mod rational;
pub mod suite;

pub use error::{Error, Result};
pub use lattice::{AtomSet, Fragment, LatVec, MeasureSpace, Partition, RefinementChain};
pub use operators::{OrthAdd, Operator, ScalarFunc, UrysonMatrix};
pub use rational::Q;
