//! Mutant generation: candidate collection, the operator catalog, and
//! classification into stillborn, duplicate and viable mutants.

pub mod apply;
pub mod candidate;
pub mod engine;
pub mod operator;

pub use apply::apply;
pub use candidate::{collect_candidates, Edit, IdentMeta, MutationCandidate, Replacement, Site, ATTACKER_ADDRESS};
pub use engine::{
    classify, classify_all, enumerate_all, generate, mutate_once, mutants_to_json, Attempt, Classification,
    GenerateError, GenerationConfig, GenerationStats, Mutant, NoMutation,
};
pub use operator::{Operator, UnknownOperator};
