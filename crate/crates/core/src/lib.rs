//! Exact tools for the Deligne–Simpson problem: Jordan data, the conditions
//! and reduction that decide solvability, generic eigenvalues and nilpotent
//! orbit closures.

pub mod decider;
pub mod error;
pub mod genericity;
pub mod jordan;
pub mod nilpotent;
pub mod partition;
pub mod problem;
pub mod random;
pub mod rational;

pub use decider::{
    decide, evaluate_conditions, nice_nilpotent_exists, psi_chain, psi_step, psi_step_with_labels, shifted_rank_bound,
    ConditionsReport, Decision, DecisionMode, PsiStage, PsiTrace, ShiftSearch, ShiftedRankBound, StopReason, TheoremId,
    Verdict,
};
pub use error::{Error, Result};
pub use genericity::{
    check_sum_condition, classify, first_violated_relation, sample_generic, violated_relations,
    violated_relations_with, Classification, EigenvalueAssignment, RelationTest, RelationWitness, SRange,
    SamplerOptions, DEFAULT_BUDGET,
};
pub use jordan::{
    block_count_gcd, orbit_dimension, pmv_gcd, rank_defect, to_diagonal, to_single_eigenvalue, ClassTuple, Flavor,
    JordanEntry, JordanNormalForm, Label,
};
pub use nilpotent::{
    adjacency_chain, apply_sl, apply_sl_padded, bump_smallest, closure_leq, rank_sequence, PaddedPartition, SLOperation,
};
pub use partition::{dual_partition, MultiplicityVector, Partition};
pub use problem::{ClassSpec, EigenvalueSpec, ProblemFile, SolverOptions};
pub use rational::ExactComplexRational;
