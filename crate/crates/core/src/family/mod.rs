//! Finite-stage projection families.
//!
//! A stage is the direct sum over levels `m = 1..=M` of `ℓ₂(d_m^{{0,1}^m})`.
//! For a branch `α ∈ {0,1}^M` and a basis of the stage, the builder picks one
//! direction per level so that no basis vector has a diagonal entry above
//! `(1 + ρ)/2`, and records a certificate that any verifier can recompute.

mod branch;
mod leakage;
mod params;
mod stage;

pub use branch::{
    branch_intersection, build_branch_projection, separating_level, suppression_bound,
    verify_suppression, BranchBuild, BranchLevel, BranchProjection, BuildConfig,
    IntersectionWitness, LevelReport, LevelRoute, SuppressionCertificate, DIAGONAL_TOLERANCE,
};
pub use leakage::{leakage_set, level_leakage_sets, level_threshold, LeakageSet, LevelLeakage};
pub use params::{
    level_predicate, min_level_dimension, parameter_trace, predicate_holds, ParameterTrace,
    PredicateEval, MAX_ALPHABET, MAX_LEVEL, MIN_ALPHABET,
};
pub use stage::{LevelSpec, Regime, StageBasis, StageParameters, BASIS_TOLERANCE};
