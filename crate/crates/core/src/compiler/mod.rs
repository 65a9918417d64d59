//! Compilation of checked units to gas-metered stack bytecode.

pub mod bytecode;
pub mod codegen;
pub mod gas;

use std::collections::BTreeSet;

use thiserror::Error;

pub use bytecode::{
    fingerprint, Bytecode, Constant, ConstructorEntry, DispatchEntry, EventSig, Fingerprint, Instruction,
    ListingEntry, Opcode, Routine, SlotType, StorageSlot,
};
pub use codegen::{compile, compile_with, CompileError};
pub use gas::{GasTable, GasTableError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instruction index {index} is outside bytecode of length {len}")]
pub struct CoverageError {
    pub index: usize,
    pub len: usize,
}

/// Fraction of distinct instructions executed.
pub fn coverage<F: num_traits::Float>(trace: &BTreeSet<usize>, b: &Bytecode) -> Result<F, CoverageError> {
    let len = b.instructions.len();
    if let Some(&index) = trace.iter().next_back().filter(|i| **i >= len) {
        return Err(CoverageError { index, len });
    }
    if len == 0 {
        return Ok(F::zero());
    }
    let num = F::from(trace.len()).expect("count fits");
    let den = F::from(len).expect("count fits");
    Ok(num / den)
}
