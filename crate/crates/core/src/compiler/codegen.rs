//! Lowering of a checked unit to stack bytecode.
//!
//! Layout: instruction 0 is the dispatcher, 1 is the halt that every
//! top-level routine returns to, then one routine per function in document
//! order, then a synthetic constructor when state initializers exist but no
//! constructor does. Modifiers are inlined at their placeholder.

use std::collections::HashMap;

use thiserror::Error;

use super::bytecode::*;
use super::gas::GasTable;
use crate::lang::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("internal compiler error: {0}")]
    Internal(String),
}

pub fn compile(unit: &CheckedUnit) -> Result<Bytecode, CompileError> {
    compile_with(unit, GasTable::standard())
}

pub fn compile_with(unit: &CheckedUnit, gas: &GasTable) -> Result<Bytecode, CompileError> {
    let c = unit.contract();
    let mut g = Gen {
        unit,
        contract: c,
        gas,
        code: Vec::new(),
        labels: Vec::new(),
        fixups: Vec::new(),
        constants: Vec::new(),
        slots: HashMap::new(),
        next_slot: 0,
        loops: Vec::new(),
        ret: RetMode::Direct,
        modifier_entries: Vec::new(),
    };
    g.emit(Opcode::Dispatch, None);
    g.emit(Opcode::Halt, None);

    let mut routines = Vec::new();
    let mut dispatcher = Vec::new();
    let mut constructor = None;
    for (index, f) in c.functions.iter().enumerate() {
        let (entry, modifier_entries) = g.routine(f)?;
        routines.push(Routine {
            name: if f.is_constructor { "constructor".into() } else { f.name.name.clone() },
            entry,
            params: f.params.len(),
            returns: f.returns.is_some(),
        });
        if f.is_constructor {
            constructor = Some(ConstructorEntry {
                routine: index,
                payable: f.mutability == Mutability::Payable,
                params: f.params.iter().map(|p| p.ty).collect(),
            });
        } else if f.visibility.is_dispatchable() {
            dispatcher.push(DispatchEntry {
                selector: f.name.name.clone(),
                function: index,
                entry,
                visibility: f.visibility,
                mutability: f.mutability,
                params: f.params.iter().map(|p| p.ty).collect(),
                returns: f.returns,
                modifier_entries,
            });
        }
    }
    if constructor.is_none() && c.state_vars.iter().any(|v| v.init.is_some() && !v.constant) {
        let entry = g.initializer_routine()?;
        constructor = Some(ConstructorEntry { routine: routines.len(), payable: false, params: Vec::new() });
        routines.push(Routine { name: "constructor".into(), entry, params: 0, returns: false });
    }
    g.patch()?;

    Ok(Bytecode {
        contract: c.name.name.clone(),
        instructions: g.code,
        constants: g.constants,
        dispatcher,
        routines,
        constructor,
        events: c
            .events
            .iter()
            .map(|e| EventSig { name: e.name.name.clone(), params: e.params.iter().map(|p| p.ty).collect() })
            .collect(),
        storage: c
            .state_vars
            .iter()
            .map(|v| StorageSlot {
                name: v.name.name.clone(),
                ty: match v.ty {
                    TypeName::Elementary(t) => SlotType::Value(t),
                    TypeName::Mapping(t) => SlotType::Mapping(t),
                },
            })
            .collect(),
    })
}

#[derive(Clone, Copy)]
enum RetMode {
    /// No modifiers: `return` is a `Ret`.
    Direct,
    /// Inside a modifier chain: store into the slot (if any) and jump to the label.
    Slot { slot: Option<usize>, end: usize },
    /// Inside a modifier body: skip to the end of that modifier.
    Modifier { end: usize },
}

#[derive(Clone, Copy)]
struct Loop {
    start: usize,
    end: usize,
}

struct Gen<'a> {
    unit: &'a CheckedUnit,
    contract: &'a ContractDecl,
    gas: &'a GasTable,
    code: Vec<Instruction>,
    /// Label id to resolved instruction index.
    labels: Vec<Option<usize>>,
    /// Instruction index to label id.
    fixups: Vec<(usize, usize)>,
    constants: Vec<Constant>,
    slots: HashMap<NodeId, usize>,
    next_slot: usize,
    loops: Vec<Loop>,
    ret: RetMode,
    modifier_entries: Vec<usize>,
}

fn internal(msg: impl Into<String>) -> CompileError {
    CompileError::Internal(msg.into())
}

impl<'a> Gen<'a> {
    fn emit(&mut self, op: Opcode, operand: Option<u64>) -> usize {
        self.code.push(Instruction { op, operand, gas: self.gas.cost(op) });
        self.code.len() - 1
    }

    fn label(&mut self) -> usize {
        self.labels.push(None);
        self.labels.len() - 1
    }

    fn place(&mut self, label: usize) {
        self.labels[label] = Some(self.code.len());
    }

    fn jump(&mut self, op: Opcode, label: usize) {
        let at = self.emit(op, Some(0));
        self.fixups.push((at, label));
    }

    fn patch(&mut self) -> Result<(), CompileError> {
        for &(at, label) in &self.fixups {
            let target = self.labels[label].ok_or_else(|| internal("unplaced label"))?;
            if target >= self.code.len() {
                return Err(internal(format!("jump target {target} out of range")));
            }
            self.code[at].operand = Some(target as u64);
        }
        Ok(())
    }

    fn constant(&mut self, c: Constant) -> u64 {
        match self.constants.iter().position(|x| *x == c) {
            Some(i) => i as u64,
            None => {
                self.constants.push(c);
                (self.constants.len() - 1) as u64
            }
        }
    }

    fn alloc(&mut self, decl: NodeId) -> usize {
        let s = self.next_slot;
        self.next_slot += 1;
        self.slots.insert(decl, s);
        s
    }

    fn slot(&self, decl: NodeId) -> Result<usize, CompileError> {
        self.slots.get(&decl).copied().ok_or_else(|| internal(format!("no local slot for {decl:?}")))
    }

    fn reset_frame(&mut self) {
        self.slots.clear();
        self.next_slot = 0;
        self.loops.clear();
        self.ret = RetMode::Direct;
        self.modifier_entries.clear();
    }

    /// Compile one function; returns its entry and inlined modifier entries.
    fn routine(&mut self, f: &'a FunctionDecl) -> Result<(usize, Vec<usize>), CompileError> {
        self.reset_frame();
        let entry = self.emit(Opcode::Enter, Some(0));
        for p in &f.params {
            self.alloc(p.id);
        }
        if f.is_constructor {
            self.state_initializers()?;
        }
        if f.modifiers.is_empty() {
            self.block(&f.body)?;
            match f.returns {
                Some(t) => {
                    self.push_default(t);
                    self.emit(Opcode::Ret, Some(1));
                }
                None => {
                    self.emit(Opcode::Ret, Some(0));
                }
            }
        } else {
            let ret_slot = f.returns.map(|t| {
                let s = self.next_slot;
                self.next_slot += 1;
                self.push_default(t);
                self.emit(Opcode::StoreLocal, Some(s as u64));
                s
            });
            self.modifier_chain(f, 0, ret_slot)?;
            match ret_slot {
                Some(s) => {
                    self.emit(Opcode::LoadLocal, Some(s as u64));
                    self.emit(Opcode::Ret, Some(1));
                }
                None => {
                    self.emit(Opcode::Ret, Some(0));
                }
            }
        }
        self.code[entry].operand = Some(self.next_slot as u64);
        Ok((entry, std::mem::take(&mut self.modifier_entries)))
    }

    fn initializer_routine(&mut self) -> Result<usize, CompileError> {
        self.reset_frame();
        let entry = self.emit(Opcode::Enter, Some(0));
        self.state_initializers()?;
        self.emit(Opcode::Ret, Some(0));
        self.code[entry].operand = Some(self.next_slot as u64);
        Ok(entry)
    }

    fn state_initializers(&mut self) -> Result<(), CompileError> {
        for (slot, v) in self.contract.state_vars.iter().enumerate() {
            if v.constant {
                continue;
            }
            if let Some(init) = &v.init {
                self.expr(init)?;
                self.emit(Opcode::SStore, Some(slot as u64));
            }
        }
        Ok(())
    }

    fn modifier_chain(&mut self, f: &'a FunctionDecl, depth: usize, ret_slot: Option<usize>) -> Result<(), CompileError> {
        let Some(inv) = f.modifiers.get(depth) else {
            let end = self.label();
            let saved = self.ret;
            self.ret = RetMode::Slot { slot: ret_slot, end };
            self.block(&f.body)?;
            self.ret = saved;
            self.place(end);
            return Ok(());
        };
        let decl = self
            .contract
            .modifier(&inv.name.name)
            .ok_or_else(|| internal(format!("unknown modifier {}", inv.name.name)))?;
        let entry = self.code.len();
        self.modifier_entries.push(entry);
        // Arguments are evaluated in the caller's scope before binding.
        for a in &inv.args {
            self.expr(a)?;
        }
        let saved_slots = self.slots.clone();
        let params: Vec<usize> = decl.params.iter().map(|p| self.alloc(p.id)).collect();
        for s in params.iter().rev() {
            self.emit(Opcode::StoreLocal, Some(*s as u64));
        }
        let end = self.label();
        let saved_ret = self.ret;
        let saved_loops = std::mem::take(&mut self.loops);
        self.ret = RetMode::Modifier { end };
        self.modifier_block(f, depth, ret_slot, &decl.body, &saved_slots)?;
        self.ret = saved_ret;
        self.loops = saved_loops;
        self.place(end);
        self.slots = saved_slots;
        Ok(())
    }

    /// A modifier body, where `_` continues the chain in the function's scope.
    fn modifier_block(
        &mut self,
        f: &'a FunctionDecl,
        depth: usize,
        ret_slot: Option<usize>,
        b: &'a Block,
        outer: &HashMap<NodeId, usize>,
    ) -> Result<(), CompileError> {
        for s in &b.stmts {
            match &s.kind {
                StmtKind::Placeholder => {
                    let mine = std::mem::replace(&mut self.slots, outer.clone());
                    let ret = self.ret;
                    let loops = std::mem::take(&mut self.loops);
                    self.modifier_chain(f, depth + 1, ret_slot)?;
                    self.ret = ret;
                    self.loops = loops;
                    self.slots = mine;
                }
                StmtKind::If { cond, then_block, else_block } => {
                    let else_l = self.label();
                    let end = self.label();
                    self.expr(cond)?;
                    self.jump(Opcode::JumpIfNot, else_l);
                    self.modifier_block(f, depth, ret_slot, then_block, outer)?;
                    if let Some(e) = else_block {
                        self.jump(Opcode::Jump, end);
                        self.place(else_l);
                        self.modifier_block(f, depth, ret_slot, e, outer)?;
                    } else {
                        self.place(else_l);
                    }
                    self.place(end);
                }
                StmtKind::While { cond, body } => {
                    let start = self.label();
                    let end = self.label();
                    self.place(start);
                    self.expr(cond)?;
                    self.jump(Opcode::JumpIfNot, end);
                    self.loops.push(Loop { start, end });
                    self.modifier_block(f, depth, ret_slot, body, outer)?;
                    self.loops.pop();
                    self.jump(Opcode::Jump, start);
                    self.place(end);
                }
                _ => self.stmt(s)?,
            }
        }
        Ok(())
    }

    fn block(&mut self, b: &Block) -> Result<(), CompileError> {
        for s in &b.stmts {
            self.stmt(s)?;
        }
        Ok(())
    }

    fn push_default(&mut self, t: ElementaryType) {
        match t {
            ElementaryType::Uint => {
                self.emit(Opcode::PushUint, Some(0));
            }
            ElementaryType::Bool => {
                self.emit(Opcode::PushBool, Some(0));
            }
            ElementaryType::Address => {
                let k = self.constant(Constant::Address(crate::vm::Address(0)));
                self.emit(Opcode::PushConst, Some(k));
            }
            ElementaryType::String => {
                let k = self.constant(Constant::Str(String::new()));
                self.emit(Opcode::PushConst, Some(k));
            }
        }
    }

    fn var(&self, ident: &Expr) -> Result<&'a VarInfo, CompileError> {
        let info: &'a SemanticInfo = &self.unit.info;
        info.var_of(ident.id).ok_or_else(|| internal(format!("unbound identifier at {:?}", ident.span)))
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), CompileError> {
        match &s.kind {
            StmtKind::VarDecl { ty, init, .. } => {
                match init {
                    Some(e) => self.expr(e)?,
                    None => self.push_default(*ty),
                }
                let slot = self.alloc(s.id);
                self.emit(Opcode::StoreLocal, Some(slot as u64));
            }
            StmtKind::Assign { target, op, value } => self.assign(target, *op, value)?,
            StmtKind::If { cond, then_block, else_block } => {
                let else_l = self.label();
                self.expr(cond)?;
                self.jump(Opcode::JumpIfNot, else_l);
                self.block(then_block)?;
                match else_block {
                    Some(e) => {
                        let end = self.label();
                        self.jump(Opcode::Jump, end);
                        self.place(else_l);
                        self.block(e)?;
                        self.place(end);
                    }
                    None => self.place(else_l),
                }
            }
            StmtKind::While { cond, body } => {
                let start = self.label();
                let end = self.label();
                self.place(start);
                self.expr(cond)?;
                self.jump(Opcode::JumpIfNot, end);
                self.loops.push(Loop { start, end });
                self.block(body)?;
                self.loops.pop();
                self.jump(Opcode::Jump, start);
                self.place(end);
            }
            StmtKind::Return(value) => match self.ret {
                RetMode::Direct => match value {
                    Some(e) => {
                        self.expr(e)?;
                        self.emit(Opcode::Ret, Some(1));
                    }
                    None => {
                        self.emit(Opcode::Ret, Some(0));
                    }
                },
                RetMode::Slot { slot, end } => {
                    if let (Some(e), Some(slot)) = (value, slot) {
                        self.expr(e)?;
                        self.emit(Opcode::StoreLocal, Some(slot as u64));
                    }
                    self.jump(Opcode::Jump, end);
                }
                RetMode::Modifier { end } => self.jump(Opcode::Jump, end),
            },
            StmtKind::Break => {
                let l = *self.loops.last().ok_or_else(|| internal("break outside loop"))?;
                self.jump(Opcode::Jump, l.end);
            }
            StmtKind::Continue => {
                let l = *self.loops.last().ok_or_else(|| internal("continue outside loop"))?;
                self.jump(Opcode::Jump, l.start);
            }
            StmtKind::Expr(e) => {
                let produces = match &e.kind {
                    ExprKind::Call { .. } => self.call(e)?,
                    _ => {
                        self.expr(e)?;
                        true
                    }
                };
                if produces {
                    self.emit(Opcode::Pop, None);
                }
            }
            StmtKind::Emit { event, args } => {
                let idx = self
                    .contract
                    .events
                    .iter()
                    .position(|e| e.name.name == event.name)
                    .ok_or_else(|| internal(format!("unknown event {}", event.name)))?;
                for a in args {
                    self.expr(a)?;
                }
                self.emit(Opcode::Emit, Some(idx as u64));
            }
            StmtKind::Require { cond, message } => {
                self.expr(cond)?;
                match message {
                    Some(m) => {
                        self.expr(m)?;
                        self.emit(Opcode::RequireMsg, None);
                    }
                    None => {
                        self.emit(Opcode::Require, None);
                    }
                }
            }
            StmtKind::Assert(cond) => {
                self.expr(cond)?;
                self.emit(Opcode::Assert, None);
            }
            StmtKind::Transfer { to, amount } => {
                self.expr(to)?;
                self.expr(amount)?;
                self.emit(Opcode::Transfer, None);
            }
            StmtKind::Placeholder => return Err(internal("placeholder outside a modifier")),
        }
        Ok(())
    }

    fn assign(&mut self, target: &Expr, op: AssignOp, value: &Expr) -> Result<(), CompileError> {
        match &target.kind {
            ExprKind::Ident(_) => {
                let var = self.var(target)?;
                let (load, store, operand) = match var.kind {
                    VarKind::State(i) => (Opcode::SLoad, Opcode::SStore, i),
                    _ => (Opcode::LoadLocal, Opcode::StoreLocal, self.slot(var.decl)?),
                };
                match op.binary() {
                    None => self.expr(value)?,
                    Some(b) => {
                        self.emit(load, Some(operand as u64));
                        self.expr(value)?;
                        self.emit(binary_opcode(b), None);
                    }
                }
                self.emit(store, Some(operand as u64));
            }
            ExprKind::Index { base, key } => {
                let slot = self.mapping_slot(base)?;
                self.expr(key)?;
                if let Some(b) = op.binary() {
                    self.emit(Opcode::Dup, None);
                    self.emit(Opcode::MLoad, Some(slot));
                    self.expr(value)?;
                    self.emit(binary_opcode(b), None);
                } else {
                    self.expr(value)?;
                }
                self.emit(Opcode::MStore, Some(slot));
            }
            _ => return Err(internal("assignment to a non-lvalue")),
        }
        Ok(())
    }

    fn mapping_slot(&self, base: &Expr) -> Result<u64, CompileError> {
        match self.var(base)?.kind {
            VarKind::State(i) => Ok(i as u64),
            _ => Err(internal("mapping is not a state variable")),
        }
    }

    /// Emit a call; returns whether it leaves a value on the stack.
    fn call(&mut self, e: &Expr) -> Result<bool, CompileError> {
        let ExprKind::Call { args, .. } = &e.kind else { return Err(internal("not a call")) };
        let index = *self.unit.info.calls.get(&e.id).ok_or_else(|| internal("unresolved call"))?;
        for a in args {
            self.expr(a)?;
        }
        self.emit(Opcode::Call, Some(index as u64));
        Ok(self.contract.functions[index].returns.is_some())
    }

    fn expr(&mut self, e: &Expr) -> Result<(), CompileError> {
        match &e.kind {
            ExprKind::Int(v) => {
                self.emit(Opcode::PushUint, Some(*v));
            }
            ExprKind::Bool(b) => {
                self.emit(Opcode::PushBool, Some(*b as u64));
            }
            ExprKind::Str(s) => {
                let k = self.constant(Constant::Str(s.clone()));
                self.emit(Opcode::PushConst, Some(k));
            }
            ExprKind::Address(a) => {
                let k = self.constant(Constant::Address(crate::vm::Address(*a)));
                self.emit(Opcode::PushConst, Some(k));
            }
            ExprKind::Ident(_) => {
                let var = self.var(e)?;
                match var.kind {
                    VarKind::State(i) if var.constant => {
                        let init = self.contract.state_vars[i]
                            .init
                            .as_ref()
                            .ok_or_else(|| internal("constant without initializer"))?;
                        self.expr(init)?;
                    }
                    VarKind::State(i) => {
                        self.emit(Opcode::SLoad, Some(i as u64));
                    }
                    _ => {
                        let s = self.slot(var.decl)?;
                        self.emit(Opcode::LoadLocal, Some(s as u64));
                    }
                }
            }
            ExprKind::Builtin(b) => {
                let op = match b {
                    Builtin::MsgSender => Opcode::Caller,
                    Builtin::MsgValue => Opcode::CallValue,
                    Builtin::TxOrigin => Opcode::Origin,
                    Builtin::BlockTimestamp => Opcode::Timestamp,
                };
                self.emit(op, None);
            }
            ExprKind::Index { base, key } => {
                let slot = self.mapping_slot(base)?;
                self.expr(key)?;
                self.emit(Opcode::MLoad, Some(slot));
            }
            ExprKind::Call { .. } => {
                if !self.call(e)? {
                    return Err(internal("void call used as a value"));
                }
            }
            ExprKind::Unary { op, operand } => match op {
                UnaryOp::Neg => {
                    self.expr(operand)?;
                    self.emit(Opcode::Neg, None);
                }
                UnaryOp::Not => {
                    self.expr(operand)?;
                    self.emit(Opcode::Not, None);
                }
                UnaryOp::PostInc | UnaryOp::PostDec => {
                    let arith = if *op == UnaryOp::PostInc { Opcode::Add } else { Opcode::Sub };
                    self.postfix(operand, arith)?;
                }
            },
            ExprKind::Binary { op, lhs, rhs } => match op {
                BinaryOp::And | BinaryOp::Or => {
                    let end = self.label();
                    self.expr(lhs)?;
                    self.emit(Opcode::Dup, None);
                    let skip = if *op == BinaryOp::And { Opcode::JumpIfNot } else { Opcode::JumpIf };
                    self.jump(skip, end);
                    self.emit(Opcode::Pop, None);
                    self.expr(rhs)?;
                    self.place(end);
                }
                _ => {
                    self.expr(lhs)?;
                    self.expr(rhs)?;
                    self.emit(binary_opcode(*op), None);
                }
            },
        }
        Ok(())
    }

    /// `x++` / `x--`: leaves the old value on the stack.
    fn postfix(&mut self, target: &Expr, arith: Opcode) -> Result<(), CompileError> {
        match &target.kind {
            ExprKind::Ident(_) => {
                let var = self.var(target)?;
                let (load, store, operand) = match var.kind {
                    VarKind::State(i) => (Opcode::SLoad, Opcode::SStore, i),
                    _ => (Opcode::LoadLocal, Opcode::StoreLocal, self.slot(var.decl)?),
                };
                self.emit(load, Some(operand as u64));
                self.emit(Opcode::Dup, None);
                self.emit(Opcode::PushUint, Some(1));
                self.emit(arith, None);
                self.emit(store, Some(operand as u64));
            }
            ExprKind::Index { base, key } => {
                let slot = self.mapping_slot(base)?;
                let tmp = self.next_slot;
                self.next_slot += 1;
                self.expr(key)?;
                self.emit(Opcode::StoreLocal, Some(tmp as u64));
                self.emit(Opcode::LoadLocal, Some(tmp as u64));
                self.emit(Opcode::MLoad, Some(slot));
                self.emit(Opcode::LoadLocal, Some(tmp as u64));
                self.emit(Opcode::LoadLocal, Some(tmp as u64));
                self.emit(Opcode::MLoad, Some(slot));
                self.emit(Opcode::PushUint, Some(1));
                self.emit(arith, None);
                self.emit(Opcode::MStore, Some(slot));
            }
            _ => return Err(internal("postfix operand is not assignable")),
        }
        Ok(())
    }
}

fn binary_opcode(op: BinaryOp) -> Opcode {
    match op {
        BinaryOp::Add => Opcode::Add,
        BinaryOp::Sub => Opcode::Sub,
        BinaryOp::Mul => Opcode::Mul,
        BinaryOp::Div => Opcode::Div,
        BinaryOp::Mod => Opcode::Mod,
        BinaryOp::Lt => Opcode::Lt,
        BinaryOp::Le => Opcode::Le,
        BinaryOp::Gt => Opcode::Gt,
        BinaryOp::Ge => Opcode::Ge,
        BinaryOp::Eq => Opcode::Eq,
        BinaryOp::Ne => Opcode::Ne,
        // Short-circuit operators are lowered to jumps.
        BinaryOp::And | BinaryOp::Or => Opcode::Eq,
    }
}
