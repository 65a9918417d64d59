use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::value::{Address, Value};
use super::world::{ContractAccount, StorageKey, WorldState};
use crate::compiler::{Bytecode, GasTable, Opcode, SlotType};
use crate::lang::{ElementaryType, Mutability};
use crate::Word;

pub const MAX_CALL_DEPTH: usize = 1024;

/// Internal gas cap for read-only calls; only there to stop runaway loops.
pub const PURE_CALL_GAS: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Deploy(Arc<Bytecode>),
    Call { contract: Address, method: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub sender: Address,
    pub target: Target,
    pub args: Vec<Value>,
    pub value: Word,
    pub timestamp: u64,
    pub gas_limit: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    Failed,
    OutOfGas,
}

/// Why a transaction failed. Kill conditions only see [`Status`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureCode {
    Require,
    Assert,
    UnknownSelector,
    BadArguments,
    NonPayable,
    DivisionByZero,
    InsufficientBalance,
    CallDepth,
    InvalidCode,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub name: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransactionOutcome {
    pub status: Status,
    pub failure: Option<FailureCode>,
    pub revert_reason: Option<String>,
    pub gas_used: u64,
    /// Empty unless the transaction succeeded.
    pub events: Vec<Event>,
    pub return_value: Option<Value>,
    /// Distinct instruction indices executed.
    pub trace: BTreeSet<usize>,
}

/// Result of a read-only call.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CallResult {
    Value(Value),
    Void,
    /// The call failed or ran out of its internal budget.
    Reverted,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VmError {
    #[error("no contract at {0}")]
    NoContract(Address),
    #[error("contract has no public method `{0}`")]
    UnknownMethod(String),
    #[error("method `{0}` is neither pure nor view")]
    NotReadOnly(String),
}

/// Deploy `code`; on success the contract lives at the returned address.
pub fn deploy(
    world: &mut WorldState,
    code: Arc<Bytecode>,
    sender: Address,
    args: Vec<Value>,
    value: Word,
    timestamp: u64,
    gas_limit: u64,
) -> (Option<Address>, TransactionOutcome) {
    let tx = Transaction { sender, target: Target::Deploy(code), args, value, timestamp, gas_limit };
    let at = world.next_contract_address();
    let out = execute_tx(world, &tx);
    (if out.status == Status::Success { Some(at) } else { None }, out)
}

/// Run a transaction; the world changes only if it succeeds.
pub fn execute_tx(world: &mut WorldState, tx: &Transaction) -> TransactionOutcome {
    execute_with(world, tx, GasTable::standard())
}

pub fn execute_with(world: &mut WorldState, tx: &Transaction, gas: &GasTable) -> TransactionOutcome {
    let mut out = TransactionOutcome {
        status: Status::Success,
        failure: None,
        revert_reason: None,
        gas_used: 0,
        events: Vec::new(),
        return_value: None,
        trace: BTreeSet::new(),
    };
    if tx.gas_limit < gas.base_transaction {
        out.status = Status::OutOfGas;
        out.gas_used = tx.gas_limit;
        return out;
    }
    let mut work = world.clone();
    let (this, code, pending) = match &tx.target {
        Target::Deploy(code) => {
            let at = work.next_contract_address();
            work.contracts.insert(at, ContractAccount { code: code.clone(), storage: Default::default() });
            work.deployed += 1;
            (at, code.clone(), Pending::Deploy)
        }
        Target::Call { contract, method } => match work.contract(*contract) {
            Some(acc) => (*contract, acc.code.clone(), Pending::Call(method.clone())),
            None => {
                out.status = Status::Failed;
                out.failure = Some(FailureCode::UnknownSelector);
                out.gas_used = gas.base_transaction;
                return out;
            }
        },
    };
    if !work.transfer(tx.sender, this, tx.value as u128) {
        out.status = Status::Failed;
        out.failure = Some(FailureCode::InsufficientBalance);
        out.gas_used = gas.base_transaction;
        return out;
    }
    let mut m = Machine {
        world: &mut work,
        code: &code,
        gas,
        this,
        origin: tx.sender,
        sender: tx.sender,
        value: tx.value,
        timestamp: tx.timestamp,
        args: tx.args.clone(),
        pending,
        gas_limit: tx.gas_limit,
        gas_used: gas.base_transaction,
        pc: 0,
        stack: Vec::new(),
        frames: Vec::new(),
        events: Vec::new(),
        trace: BTreeSet::new(),
    };
    let end = m.run();
    out.trace = std::mem::take(&mut m.trace);
    match end {
        Ok(ret) => {
            out.gas_used = m.gas_used;
            out.events = std::mem::take(&mut m.events);
            out.return_value = ret;
            work.timestamp = tx.timestamp;
            *world = work;
        }
        Err(Halt::OutOfGas) => {
            out.status = Status::OutOfGas;
            out.gas_used = tx.gas_limit;
        }
        Err(Halt::Fail(code, reason)) => {
            out.status = Status::Failed;
            out.failure = Some(code);
            out.revert_reason = reason;
            out.gas_used = m.gas_used;
        }
    }
    out
}

/// Call a pure or view method without a transaction. The world is untouched.
pub fn call_pure(world: &WorldState, contract: Address, method: &str, args: &[Value]) -> Result<CallResult, VmError> {
    let acc = world.contract(contract).ok_or(VmError::NoContract(contract))?;
    let entry = acc.code.dispatch(method).ok_or_else(|| VmError::UnknownMethod(method.to_string()))?;
    if !entry.mutability.is_read_only() {
        return Err(VmError::NotReadOnly(method.to_string()));
    }
    let mut scratch = world.clone();
    let tx = Transaction {
        sender: Address(0),
        target: Target::Call { contract, method: method.to_string() },
        args: args.to_vec(),
        value: 0,
        timestamp: world.timestamp,
        gas_limit: PURE_CALL_GAS,
    };
    let out = execute_tx(&mut scratch, &tx);
    Ok(match out.status {
        Status::Success => match out.return_value {
            Some(v) => CallResult::Value(v),
            None => CallResult::Void,
        },
        _ => CallResult::Reverted,
    })
}

enum Pending {
    Deploy,
    Call(String),
}

enum Halt {
    OutOfGas,
    Fail(FailureCode, Option<String>),
}

fn fail<T>(code: FailureCode) -> Result<T, Halt> {
    Err(Halt::Fail(code, None))
}

struct Frame {
    locals: Vec<Value>,
    ret_pc: usize,
    base: usize,
    sender: Address,
}

struct Machine<'a> {
    world: &'a mut WorldState,
    code: &'a Bytecode,
    gas: &'a GasTable,
    this: Address,
    origin: Address,
    sender: Address,
    value: Word,
    timestamp: u64,
    args: Vec<Value>,
    pending: Pending,
    gas_limit: u64,
    gas_used: u64,
    pc: usize,
    stack: Vec<Value>,
    frames: Vec<Frame>,
    events: Vec<Event>,
    trace: BTreeSet<usize>,
}

fn type_ok(v: &Value, t: ElementaryType) -> bool {
    v.ty() == t
}

impl Machine<'_> {
    fn charge(&mut self, cost: u64) -> Result<(), Halt> {
        match self.gas_used.checked_add(cost) {
            Some(total) if total <= self.gas_limit => {
                self.gas_used = total;
                Ok(())
            }
            _ => Err(Halt::OutOfGas),
        }
    }

    fn pop(&mut self) -> Result<Value, Halt> {
        self.stack.pop().ok_or(Halt::Fail(FailureCode::InvalidCode, None))
    }

    fn pop_uint(&mut self) -> Result<Word, Halt> {
        self.pop()?.as_uint().ok_or(Halt::Fail(FailureCode::InvalidCode, None))
    }

    fn pop_bool(&mut self) -> Result<bool, Halt> {
        self.pop()?.as_bool().ok_or(Halt::Fail(FailureCode::InvalidCode, None))
    }

    fn pop_address(&mut self) -> Result<Address, Halt> {
        self.pop()?.as_address().ok_or(Halt::Fail(FailureCode::InvalidCode, None))
    }

    fn frame(&mut self) -> Result<&mut Frame, Halt> {
        self.frames.last_mut().ok_or(Halt::Fail(FailureCode::InvalidCode, None))
    }

    fn account(&mut self) -> &mut ContractAccount {
        self.world.contracts.get_mut(&self.this).expect("executing contract exists")
    }

    fn slot_default(&self, slot: u64) -> Result<Value, Halt> {
        match self.code.storage.get(slot as usize).map(|s| s.ty) {
            Some(SlotType::Value(t)) | Some(SlotType::Mapping(t)) => Ok(Value::zero(t)),
            None => fail(FailureCode::InvalidCode),
        }
    }

    fn load(&mut self, key: StorageKey, slot: u64) -> Result<Value, Halt> {
        match self.account().load(key) {
            Some(v) => Ok(v.clone()),
            None => self.slot_default(slot),
        }
    }

    fn enter(&mut self, entry: usize, params: &[ElementaryType], payable: bool) -> Result<(), Halt> {
        if self.args.len() != params.len() || !self.args.iter().zip(params).all(|(a, t)| type_ok(a, *t)) {
            return fail(FailureCode::BadArguments);
        }
        if self.value > 0 && !payable {
            return fail(FailureCode::NonPayable);
        }
        let locals = std::mem::take(&mut self.args);
        self.frames.push(Frame { locals, ret_pc: 1, base: 0, sender: self.sender });
        self.pc = entry;
        Ok(())
    }

    fn run(&mut self) -> Result<Option<Value>, Halt> {
        let code = self.code;
        loop {
            let Some(ins) = code.instructions.get(self.pc) else {
                return fail(FailureCode::InvalidCode);
            };
            self.trace.insert(self.pc);
            if !ins.op.has_dynamic_gas() {
                self.charge(ins.gas)?;
            }
            let operand = ins.operand.unwrap_or(0);
            let mut next = self.pc + 1;
            match ins.op {
                Opcode::Dispatch => match &self.pending {
                    Pending::Deploy => match &code.constructor {
                        Some(c) => {
                            let entry = code.routines[c.routine].entry;
                            let params = c.params.clone();
                            self.enter(entry, &params, c.payable)?;
                            next = self.pc;
                        }
                        None if self.value > 0 => return fail(FailureCode::NonPayable),
                        None if !self.args.is_empty() => return fail(FailureCode::BadArguments),
                        None => next = 1,
                    },
                    Pending::Call(method) => {
                        let Some(d) = code.dispatch(method) else {
                            return fail(FailureCode::UnknownSelector);
                        };
                        self.enter(d.entry, &d.params, d.mutability == Mutability::Payable)?;
                        next = self.pc;
                    }
                },
                Opcode::Halt => return Ok(self.stack.pop()),
                Opcode::Enter => {
                    let f = self.frame()?;
                    f.locals.resize(operand as usize, Value::Uint(0));
                }
                Opcode::PushUint => self.stack.push(Value::Uint(operand)),
                Opcode::PushBool => self.stack.push(Value::Bool(operand != 0)),
                Opcode::PushConst => {
                    let v = match code.constants.get(operand as usize) {
                        Some(crate::compiler::Constant::Str(s)) => Value::Str(s.clone()),
                        Some(crate::compiler::Constant::Address(a)) => Value::Address(*a),
                        None => return fail(FailureCode::InvalidCode),
                    };
                    self.stack.push(v);
                }
                Opcode::Pop => {
                    self.pop()?;
                }
                Opcode::Dup => {
                    let v = self.stack.last().cloned().ok_or(Halt::Fail(FailureCode::InvalidCode, None))?;
                    self.stack.push(v);
                }
                Opcode::LoadLocal => {
                    let v = self.frame()?.locals.get(operand as usize).cloned();
                    self.stack.push(v.ok_or(Halt::Fail(FailureCode::InvalidCode, None))?);
                }
                Opcode::StoreLocal => {
                    let v = self.pop()?;
                    let slot = self
                        .frame()?
                        .locals
                        .get_mut(operand as usize)
                        .ok_or(Halt::Fail(FailureCode::InvalidCode, None))?;
                    *slot = v;
                }
                Opcode::SLoad => {
                    let v = self.load(StorageKey::Slot(operand), operand)?;
                    self.stack.push(v);
                }
                Opcode::SStore => {
                    let v = self.pop()?;
                    self.charge(self.gas.storage_write(v.words(), v.is_zero()))?;
                    self.account().store(StorageKey::Slot(operand), v);
                }
                Opcode::MLoad => {
                    let key = self.pop_address()?;
                    let v = self.load(StorageKey::Entry(operand, key), operand)?;
                    self.stack.push(v);
                }
                Opcode::MStore => {
                    let v = self.pop()?;
                    let key = self.pop_address()?;
                    self.charge(self.gas.storage_write(v.words(), v.is_zero()))?;
                    self.account().store(StorageKey::Entry(operand, key), v);
                }
                Opcode::Add | Opcode::Sub | Opcode::Mul | Opcode::Div | Opcode::Mod => {
                    let b = self.pop_uint()?;
                    let a = self.pop_uint()?;
                    let r = match ins.op {
                        Opcode::Add => a.wrapping_add(b),
                        Opcode::Sub => a.wrapping_sub(b),
                        Opcode::Mul => a.wrapping_mul(b),
                        _ if b == 0 => return fail(FailureCode::DivisionByZero),
                        Opcode::Div => a / b,
                        _ => a % b,
                    };
                    self.stack.push(Value::Uint(r));
                }
                Opcode::Lt | Opcode::Le | Opcode::Gt | Opcode::Ge => {
                    let b = self.pop_uint()?;
                    let a = self.pop_uint()?;
                    let r = match ins.op {
                        Opcode::Lt => a < b,
                        Opcode::Le => a <= b,
                        Opcode::Gt => a > b,
                        _ => a >= b,
                    };
                    self.stack.push(Value::Bool(r));
                }
                Opcode::Eq | Opcode::Ne => {
                    let b = self.pop()?;
                    let a = self.pop()?;
                    self.stack.push(Value::Bool((a == b) == (ins.op == Opcode::Eq)));
                }
                Opcode::Neg => {
                    let a = self.pop_uint()?;
                    self.stack.push(Value::Uint(a.wrapping_neg()));
                }
                Opcode::Not => {
                    let a = self.pop_bool()?;
                    self.stack.push(Value::Bool(!a));
                }
                Opcode::Jump => next = operand as usize,
                Opcode::JumpIf => {
                    if self.pop_bool()? {
                        next = operand as usize;
                    }
                }
                Opcode::JumpIfNot => {
                    if !self.pop_bool()? {
                        next = operand as usize;
                    }
                }
                Opcode::Caller => {
                    let s = self.frame()?.sender;
                    self.stack.push(Value::Address(s));
                }
                Opcode::Origin => self.stack.push(Value::Address(self.origin)),
                Opcode::CallValue => self.stack.push(Value::Uint(self.value)),
                Opcode::Timestamp => self.stack.push(Value::Uint(self.timestamp)),
                Opcode::Call => {
                    let Some(r) = code.routines.get(operand as usize) else {
                        return fail(FailureCode::InvalidCode);
                    };
                    if self.frames.len() >= MAX_CALL_DEPTH {
                        return fail(FailureCode::CallDepth);
                    }
                    if self.stack.len() < r.params {
                        return fail(FailureCode::InvalidCode);
                    }
                    let locals = self.stack.split_off(self.stack.len() - r.params);
                    self.frames.push(Frame { locals, ret_pc: next, base: self.stack.len(), sender: self.this });
                    next = r.entry;
                }
                Opcode::Ret => {
                    let v = if operand == 1 { Some(self.pop()?) } else { None };
                    let f = self.frames.pop().ok_or(Halt::Fail(FailureCode::InvalidCode, None))?;
                    self.stack.truncate(f.base);
                    self.stack.extend(v);
                    next = f.ret_pc;
                }
                Opcode::Emit => {
                    let Some(sig) = code.events.get(operand as usize) else {
                        return fail(FailureCode::InvalidCode);
                    };
                    if self.stack.len() < sig.params.len() {
                        return fail(FailureCode::InvalidCode);
                    }
                    let values = self.stack.split_off(self.stack.len() - sig.params.len());
                    let words: u64 = values.iter().map(Value::words).sum();
                    self.charge(self.gas.event(words))?;
                    self.events.push(Event { name: sig.name.clone(), values });
                }
                Opcode::Require | Opcode::Assert => {
                    if !self.pop_bool()? {
                        let code = if ins.op == Opcode::Require { FailureCode::Require } else { FailureCode::Assert };
                        return fail(code);
                    }
                }
                Opcode::RequireMsg => {
                    let msg = self.pop()?;
                    if !self.pop_bool()? {
                        let reason = match msg {
                            Value::Str(s) => Some(s),
                            other => Some(other.to_string()),
                        };
                        return Err(Halt::Fail(FailureCode::Require, reason));
                    }
                }
                Opcode::Transfer => {
                    let amount = self.pop_uint()?;
                    let to = self.pop_address()?;
                    if !self.world.transfer(self.this, to, amount as u128) {
                        return fail(FailureCode::InsufficientBalance);
                    }
                }
            }
            self.pc = next;
        }
    }
}
