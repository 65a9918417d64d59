use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::lang::{ElementaryType, Mutability, Visibility};
use crate::vm::Address;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Opcode {
    /// Resolve the pending call against the dispatcher and enter it.
    Dispatch,
    Halt,
    /// Grow the current frame to `operand` locals.
    Enter,
    PushUint,
    PushBool,
    PushConst,
    Pop,
    Dup,
    LoadLocal,
    StoreLocal,
    SLoad,
    SStore,
    /// Mapping read; key on the stack.
    MLoad,
    /// Mapping write; stack holds key then value.
    MStore,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Neg,
    Not,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Jump,
    JumpIf,
    JumpIfNot,
    Caller,
    Origin,
    CallValue,
    Timestamp,
    /// Call function `operand` (index into the routine table).
    Call,
    /// Return; `operand` is 1 when a value is returned.
    Ret,
    Emit,
    Require,
    RequireMsg,
    Assert,
    Transfer,
}

impl Opcode {
    pub const ALL: [Opcode; 41] = [
        Opcode::Dispatch,
        Opcode::Halt,
        Opcode::Enter,
        Opcode::PushUint,
        Opcode::PushBool,
        Opcode::PushConst,
        Opcode::Pop,
        Opcode::Dup,
        Opcode::LoadLocal,
        Opcode::StoreLocal,
        Opcode::SLoad,
        Opcode::SStore,
        Opcode::MLoad,
        Opcode::MStore,
        Opcode::Add,
        Opcode::Sub,
        Opcode::Mul,
        Opcode::Div,
        Opcode::Mod,
        Opcode::Neg,
        Opcode::Not,
        Opcode::Lt,
        Opcode::Le,
        Opcode::Gt,
        Opcode::Ge,
        Opcode::Eq,
        Opcode::Ne,
        Opcode::Jump,
        Opcode::JumpIf,
        Opcode::JumpIfNot,
        Opcode::Caller,
        Opcode::Origin,
        Opcode::CallValue,
        Opcode::Timestamp,
        Opcode::Call,
        Opcode::Ret,
        Opcode::Emit,
        Opcode::Require,
        Opcode::RequireMsg,
        Opcode::Assert,
        Opcode::Transfer,
    ];

    pub fn is_jump(self) -> bool {
        matches!(self, Opcode::Jump | Opcode::JumpIf | Opcode::JumpIfNot)
    }

    /// Charged by value size at run time instead of the static table cost.
    pub fn has_dynamic_gas(self) -> bool {
        matches!(self, Opcode::SStore | Opcode::MStore | Opcode::Emit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instruction {
    pub op: Opcode,
    pub operand: Option<u64>,
    /// Static cost from the gas table.
    pub gas: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constant {
    Str(String),
    Address(Address),
}

/// Entry for a function reachable by transactions and off-chain calls.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispatchEntry {
    pub selector: String,
    pub function: usize,
    pub entry: usize,
    pub visibility: Visibility,
    pub mutability: Mutability,
    pub params: Vec<ElementaryType>,
    pub returns: Option<ElementaryType>,
    /// First instruction of each inlined modifier, in invocation order.
    pub modifier_entries: Vec<usize>,
}

/// Any compiled function, internal or not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Routine {
    pub name: String,
    pub entry: usize,
    pub params: usize,
    pub returns: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventSig {
    pub name: String,
    pub params: Vec<ElementaryType>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotType {
    Value(ElementaryType),
    Mapping(ElementaryType),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageSlot {
    pub name: String,
    pub ty: SlotType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bytecode {
    pub contract: String,
    pub instructions: Vec<Instruction>,
    pub constants: Vec<Constant>,
    pub dispatcher: Vec<DispatchEntry>,
    pub routines: Vec<Routine>,
    /// Routine run at deployment: constructor body plus state initializers.
    pub constructor: Option<ConstructorEntry>,
    pub events: Vec<EventSig>,
    pub storage: Vec<StorageSlot>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructorEntry {
    pub routine: usize,
    pub payable: bool,
    pub params: Vec<ElementaryType>,
}

/// SHA-256 over the canonical serialization of a [`Bytecode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub [u8; 32]);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One line of the debugging listing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListingEntry {
    pub index: usize,
    pub opcode: Opcode,
    pub operand: Option<u64>,
    pub gas: u64,
}

impl Bytecode {
    /// Canonical byte encoding; two bytecodes are identical iff these match.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("bytecode serializes")
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let digest = Sha256::digest(self.to_bytes());
        let mut out = [0u8; 32];
        out.copy_from_slice(&digest);
        Fingerprint(out)
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn dispatch(&self, selector: &str) -> Option<&DispatchEntry> {
        self.dispatcher.iter().find(|d| d.selector == selector)
    }

    pub fn listing(&self) -> Vec<ListingEntry> {
        self.instructions
            .iter()
            .enumerate()
            .map(|(index, i)| ListingEntry { index, opcode: i.op, operand: i.operand, gas: i.gas })
            .collect()
    }

    pub fn listing_json(&self) -> String {
        serde_json::to_string_pretty(&self.listing()).expect("listing serializes")
    }
}

/// Shorthand for [`Bytecode::fingerprint`].
pub fn fingerprint(b: &Bytecode) -> Fingerprint {
    b.fingerprint()
}
