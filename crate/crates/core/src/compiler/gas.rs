use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bytecode::Opcode;

/// The gas table shipped with the crate.
pub const STANDARD_GAS_TABLE: &str = include_str!("../../data/gas_table.json");

/// Gas cost per opcode plus the dynamic storage, event and transaction costs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GasTable {
    pub version: u32,
    pub base_transaction: u64,
    /// Per word written whose new value is zero.
    pub storage_write_zero: u64,
    /// Per word written whose new value is non-zero.
    pub storage_write_nonzero: u64,
    pub event_base: u64,
    pub event_per_word: u64,
    pub opcodes: BTreeMap<Opcode, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GasTableError {
    #[error("malformed gas table: {0}")]
    Parse(String),
    #[error("gas table has no cost for opcode {0:?}")]
    Missing(Opcode),
    #[error("gas table entry `{0}` must be strictly positive")]
    NonPositive(String),
}

impl GasTable {
    pub fn from_json(text: &str) -> Result<GasTable, GasTableError> {
        let table: GasTable =
            serde_json::from_str(text).map_err(|e| GasTableError::Parse(e.to_string()))?;
        table.validate()?;
        Ok(table)
    }

    pub fn standard() -> &'static GasTable {
        static TABLE: OnceLock<GasTable> = OnceLock::new();
        TABLE.get_or_init(|| GasTable::from_json(STANDARD_GAS_TABLE).expect("bundled gas table is valid"))
    }

    pub fn validate(&self) -> Result<(), GasTableError> {
        for op in Opcode::ALL {
            match self.opcodes.get(&op) {
                None => return Err(GasTableError::Missing(op)),
                Some(0) => return Err(GasTableError::NonPositive(format!("{op:?}"))),
                Some(_) => {}
            }
        }
        for (name, v) in [
            ("base_transaction", self.base_transaction),
            ("storage_write_zero", self.storage_write_zero),
            ("storage_write_nonzero", self.storage_write_nonzero),
            ("event_base", self.event_base),
            ("event_per_word", self.event_per_word),
        ] {
            if v == 0 {
                return Err(GasTableError::NonPositive(name.to_string()));
            }
        }
        Ok(())
    }

    pub fn cost(&self, op: Opcode) -> u64 {
        self.opcodes[&op]
    }

    pub fn storage_write(&self, words: u64, zero: bool) -> u64 {
        words * if zero { self.storage_write_zero } else { self.storage_write_nonzero }
    }

    pub fn event(&self, payload_words: u64) -> u64 {
        self.event_base + self.event_per_word * payload_words
    }
}
