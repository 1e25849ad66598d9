//! Finite measure-algebra model of a vector lattice.
//!
//! Atoms are indexed `0..n` in a fixed order; that order drives every
//! enumeration in the crate, so certificates are reproducible.

mod fragment;
mod partition;
mod projection;
mod space;
mod vector;

pub use fragment::{enumerate_fragments, is_fragment, AtomSet, Fragment, Fragments};
pub use partition::{
    bell_number, common_refinement, enumerate_partitions, partition_refines, Partition,
    Partitions, RgsIter,
};
pub use projection::{band_projection, one_f};
pub use space::{MeasureSpace, RefinementChain};
pub use vector::{lattice_binary, lattice_unary, BinaryKind, LatVec, UnaryKind};

/// Default cap on the support size for fragment enumeration (2^n fragments).
pub const FRAGMENT_CAP: usize = 20;
/// Default cap on the support size for partition enumeration (Bell(n) partitions).
pub const PARTITION_CAP: usize = 12;

/// Enumeration caps, overridable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub fragments: usize,
    pub partitions: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            fragments: FRAGMENT_CAP,
            partitions: PARTITION_CAP,
        }
    }
}
