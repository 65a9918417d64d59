//! Mutation testing for MiniSol, a small smart-contract language, with a
//! gas-metered virtual machine and replay-based kill conditions.

pub mod compiler;
pub mod harness;
pub mod lang;
pub mod mutation;
pub mod report;
pub mod stats;
pub mod vm;

/// Machine word: integers, addresses and storage slots.
pub type Word = u64;

/// Floating type used for scores, coverage and statistics.
pub type Score = f64;
