//! Kronecker canonical structure: block builders, assembly, random strict
//! equivalence, structure recovery and the singularity decision.

pub mod scramble;
pub mod singularity;
pub mod staircase;
pub mod structure;

pub use scramble::scramble;
pub use singularity::{is_singular, normal_rank, SingularityEvidence, SingularityVerdict};
pub use staircase::{minimal_indices, staircase_structure};
pub use structure::{assemble, build_block, BlockKind, EquivalencePair, JordanBlock, KroneckerStructure, MinimalIndex};
