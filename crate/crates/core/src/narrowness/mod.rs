//! Narrowness tools: discrepancy minimisation, the Enflo–Starbird function,
//! disjoint trees and the refinement diagnostics built on them.

mod discrepancy;
mod lambda;
mod tree;
mod pipeline;
mod diagnostics;
mod dp;
mod l1;

pub use discrepancy::{
    combine_signed, discrepancy, min_discrepancy, DecompositionWitness, DISCREPANCY_STATE_CAP,
};
pub use lambda::{
    lambda_es, lambda_join_law, EnfloStarbirdResult, JoinLawReport, LambdaStrategy, SearchStats,
};
pub use tree::{balanced_tree, rounding_decomposition, DisjointTree, HalvingCheck};
pub use pipeline::{lambda_to_narrow_pipeline, PipelineReport};
pub use diagnostics::{
    domination_diagnostic, refinement_diagnostics, DeltaCurve, DominationReport, OperatorFamily,
    Trend,
};
pub use l1::{l1_identity_check, verify_l1_partition_bound, L1IdentityReport, PartitionBoundReport};
pub use dp::{dp_minorant_from_homomorphism, dp_witness_extract, DPWitness, DpVerification};
