//! Name resolution, type checking and mutability enforcement.
//!
//! Typing is strict: there are no implicit conversions, so arithmetic on an
//! address or a comparison between a bool and a uint is an error. The
//! resulting [`CheckedUnit`] carries the symbol tables the compiler and the
//! mutation engine consume.

use std::collections::{BTreeMap, HashMap};

use super::ast::*;
use super::diagnostic::{Code, Diagnostic};

/// Type of a variable declaration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarType {
    Value(ElementaryType),
    Mapping(ElementaryType),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarScope {
    State,
    /// Parameters and locals of a function or modifier.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// Index into the contract's state variable list, which is its storage slot.
    State(usize),
    Param,
    Local,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub decl: NodeId,
    pub name: String,
    pub ty: VarType,
    pub scope: VarScope,
    pub constant: bool,
    pub kind: VarKind,
    /// Declaring function or modifier; `None` for state variables.
    pub owner: Option<NodeId>,
    /// Locals only: whether the declaration has an initializer.
    pub has_init: bool,
}

/// Symbol tables produced by [`check`].
#[derive(Debug, Clone, Default)]
pub struct SemanticInfo {
    /// Every variable declaration, keyed by the id of the declaring node
    /// (state variable, parameter, or local `VarDecl` statement).
    pub vars: BTreeMap<NodeId, VarInfo>,
    /// Identifier expression id to variable declaration id.
    pub bindings: HashMap<NodeId, NodeId>,
    /// Call expression id to index into the contract's function list.
    pub calls: HashMap<NodeId, usize>,
    /// Value type of every value-producing expression.
    pub expr_types: HashMap<NodeId, ElementaryType>,
    /// For each identifier expression, the variables in scope at that point,
    /// in declaration order.
    pub visible: HashMap<NodeId, Vec<NodeId>>,
    /// Function or modifier enclosing each statement and expression.
    pub owners: HashMap<NodeId, NodeId>,
}

impl SemanticInfo {
    pub fn var_of(&self, ident_expr: NodeId) -> Option<&VarInfo> {
        self.bindings.get(&ident_expr).and_then(|d| self.vars.get(d))
    }
}

#[derive(Debug, Clone)]
pub struct CheckedUnit {
    pub unit: SourceUnit,
    pub info: SemanticInfo,
    /// Warnings only; errors prevent construction.
    pub warnings: Vec<Diagnostic>,
}

impl CheckedUnit {
    pub fn contract(&self) -> &ContractDecl {
        &self.unit.contracts[0]
    }
}

/// Check a parsed unit. Any error diagnostic means no [`CheckedUnit`].
pub fn check(unit: &SourceUnit) -> Result<CheckedUnit, Vec<Diagnostic>> {
    let mut ck = Checker { diags: Vec::new(), info: SemanticInfo::default() };
    if unit.contracts.len() != 1 {
        return Err(vec![Diagnostic::error(
            Code::E0109,
            unit.span,
            format!("a source unit must declare exactly one contract, found {}", unit.contracts.len()),
        )]);
    }
    ck.contract(&unit.contracts[0]);
    if ck.diags.iter().any(Diagnostic::is_error) {
        Err(ck.diags)
    } else {
        Ok(CheckedUnit { unit: unit.clone(), info: ck.info, warnings: ck.diags })
    }
}

/// First span at which each kind of side effect was seen.
#[derive(Debug, Default, Clone, Copy)]
struct Effects {
    read: Option<Span>,
    write: Option<Span>,
    env: Option<Span>,
    value: Option<Span>,
}

impl Effects {
    fn note(slot: &mut Option<Span>, span: Span) {
        if slot.is_none() {
            *slot = Some(span);
        }
    }
}

struct Ctx<'c> {
    contract: &'c ContractDecl,
    owner: NodeId,
    is_modifier: bool,
    returns: Option<ElementaryType>,
    loop_depth: usize,
    placeholders: usize,
    scopes: Vec<Vec<(String, NodeId)>>,
    effects: Effects,
}

struct Checker {
    diags: Vec<Diagnostic>,
    info: SemanticInfo,
}

fn vt(t: ElementaryType) -> String {
    t.keyword().to_string()
}

impl Checker {
    fn error(&mut self, code: Code, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, msg));
    }

    fn contract(&mut self, c: &ContractDecl) {
        // One namespace for all contract-level names.
        let mut seen: HashMap<&str, ()> = HashMap::new();
        let names = c
            .state_vars
            .iter()
            .map(|v| &v.name)
            .chain(c.events.iter().map(|e| &e.name))
            .chain(c.modifiers.iter().map(|m| &m.name))
            .chain(c.functions.iter().filter(|f| !f.is_constructor).map(|f| &f.name));
        for name in names {
            if seen.insert(name.name.as_str(), ()).is_some() {
                self.error(Code::E0104, name.span, format!("`{}` is declared twice", name.name));
            }
        }
        let ctors: Vec<_> = c.functions.iter().filter(|f| f.is_constructor).collect();
        for extra in ctors.iter().skip(1) {
            self.error(Code::E0104, extra.header_span, "more than one constructor");
        }

        for (index, v) in c.state_vars.iter().enumerate() {
            let ty = match v.ty {
                TypeName::Elementary(t) => VarType::Value(t),
                TypeName::Mapping(t) => VarType::Mapping(t),
            };
            self.info.vars.insert(
                v.id,
                VarInfo {
                    decl: v.id,
                    name: v.name.name.clone(),
                    ty,
                    scope: VarScope::State,
                    constant: v.constant,
                    kind: VarKind::State(index),
                    owner: None,
                    has_init: v.init.is_some(),
                },
            );
        }
        for e in &c.events {
            self.unique_params(&e.params);
        }

        for v in &c.state_vars {
            self.state_var(c, v);
        }
        for m in &c.modifiers {
            self.modifier(c, m);
        }
        for f in &c.functions {
            self.function(c, f);
        }
    }

    fn unique_params(&mut self, params: &[Param]) {
        for (i, p) in params.iter().enumerate() {
            if params[..i].iter().any(|q| q.name.name == p.name.name) {
                self.error(Code::E0104, p.name.span, format!("parameter `{}` declared twice", p.name.name));
            }
        }
    }

    fn new_ctx<'c>(&self, contract: &'c ContractDecl, owner: NodeId) -> Ctx<'c> {
        Ctx {
            contract,
            owner,
            is_modifier: false,
            returns: None,
            loop_depth: 0,
            placeholders: 0,
            scopes: vec![Vec::new()],
            effects: Effects::default(),
        }
    }

    fn state_var(&mut self, c: &ContractDecl, v: &StateVarDecl) {
        let Some(init) = &v.init else {
            if v.constant {
                self.error(Code::E0103, v.span, format!("constant `{}` needs an initializer", v.name.name));
            }
            return;
        };
        let TypeName::Elementary(declared) = v.ty else {
            self.error(Code::E0102, init.span, "mappings cannot be initialized");
            return;
        };
        let mut ctx = self.new_ctx(c, v.id);
        if let Some(t) = self.expr(&mut ctx, init) {
            if t != declared {
                self.error(
                    Code::E0102,
                    init.span,
                    format!("cannot initialize `{}` of type {} with {}", v.name.name, vt(declared), vt(t)),
                );
            }
        }
        if v.constant {
            let fx = ctx.effects;
            if let Some(span) = fx.read.or(fx.write).or(fx.env).or(fx.value) {
                self.error(Code::E0103, span, "constant initializers must not depend on state or environment");
            }
        }
    }

    fn declare_params(&mut self, ctx: &mut Ctx, params: &[Param]) {
        self.unique_params(params);
        for p in params {
            self.info.vars.insert(
                p.id,
                VarInfo {
                    decl: p.id,
                    name: p.name.name.clone(),
                    ty: VarType::Value(p.ty),
                    scope: VarScope::Local,
                    constant: false,
                    kind: VarKind::Param,
                    owner: Some(ctx.owner),
                    has_init: false,
                },
            );
            ctx.scopes[0].push((p.name.name.clone(), p.id));
        }
    }

    fn modifier(&mut self, c: &ContractDecl, m: &ModifierDecl) {
        let mut ctx = self.new_ctx(c, m.id);
        ctx.is_modifier = true;
        self.declare_params(&mut ctx, &m.params);
        self.block(&mut ctx, &m.body);
        if ctx.placeholders != 1 {
            self.error(
                Code::E0110,
                m.name.span,
                format!("modifier `{}` must contain exactly one `_;`, found {}", m.name.name, ctx.placeholders),
            );
        }
    }

    /// Effects of a modifier body, recomputed without recording symbols twice.
    fn modifier_effects(&self, c: &ContractDecl, m: &ModifierDecl) -> Effects {
        let mut scratch = Checker { diags: Vec::new(), info: self.info.clone() };
        let mut ctx = scratch.new_ctx(c, m.id);
        ctx.is_modifier = true;
        for p in &m.params {
            ctx.scopes[0].push((p.name.name.clone(), p.id));
        }
        scratch.block(&mut ctx, &m.body);
        ctx.effects
    }

    fn function(&mut self, c: &ContractDecl, f: &FunctionDecl) {
        let mut ctx = self.new_ctx(c, f.id);
        ctx.returns = f.returns;
        self.declare_params(&mut ctx, &f.params);

        for inv in &f.modifiers {
            let Some(decl) = c.modifier(&inv.name.name) else {
                self.error(Code::E0101, inv.name.span, format!("unknown modifier `{}`", inv.name.name));
                for a in &inv.args {
                    self.expr(&mut ctx, a);
                }
                continue;
            };
            if decl.params.len() != inv.args.len() {
                self.error(
                    Code::E0105,
                    inv.span,
                    format!(
                        "modifier `{}` takes {} argument(s), {} given",
                        inv.name.name,
                        decl.params.len(),
                        inv.args.len()
                    ),
                );
            }
            for (i, a) in inv.args.iter().enumerate() {
                let got = self.expr(&mut ctx, a);
                if let (Some(got), Some(p)) = (got, decl.params.get(i)) {
                    if got != p.ty {
                        self.error(
                            Code::E0102,
                            a.span,
                            format!("modifier argument expects {}, found {}", vt(p.ty), vt(got)),
                        );
                    }
                }
            }
            let fx = self.modifier_effects(c, decl);
            for (slot, span) in [
                (&mut ctx.effects.read, fx.read),
                (&mut ctx.effects.write, fx.write),
                (&mut ctx.effects.env, fx.env),
                (&mut ctx.effects.value, fx.value),
            ] {
                if span.is_some() {
                    Effects::note(slot, inv.span);
                }
            }
        }

        self.block(&mut ctx, &f.body);

        let fx = ctx.effects;
        let name = &f.name.name;
        if f.is_constructor && f.mutability.is_read_only() {
            self.error(Code::E0103, f.header_span, "constructors cannot be pure or view");
        }
        match f.mutability {
            Mutability::Pure => {
                if let Some(s) = fx.read {
                    self.error(Code::E0103, s, format!("pure function `{name}` reads contract state"));
                }
                if let Some(s) = fx.write {
                    self.error(Code::E0103, s, format!("pure function `{name}` modifies contract state"));
                }
                if let Some(s) = fx.env.or(fx.value) {
                    self.error(Code::E0103, s, format!("pure function `{name}` reads the environment"));
                }
            }
            Mutability::View => {
                if let Some(s) = fx.write {
                    self.error(Code::E0103, s, format!("view function `{name}` modifies contract state"));
                }
                if let Some(s) = fx.value {
                    self.error(Code::E0103, s, "`msg.value` is only available in payable functions");
                }
            }
            Mutability::Nonpayable => {
                if let Some(s) = fx.value {
                    if f.visibility.is_dispatchable() || f.is_constructor {
                        self.error(Code::E0103, s, "`msg.value` is only available in payable functions");
                    }
                }
            }
            Mutability::Payable => {
                if !f.visibility.is_dispatchable() && !f.is_constructor {
                    self.error(Code::E0103, f.header_span, "internal or private functions cannot be payable");
                }
            }
        }
    }

    fn block(&mut self, ctx: &mut Ctx, b: &Block) {
        ctx.scopes.push(Vec::new());
        for s in &b.stmts {
            self.stmt(ctx, s);
        }
        ctx.scopes.pop();
    }

    fn lookup(&self, ctx: &Ctx, name: &str) -> Option<NodeId> {
        for scope in ctx.scopes.iter().rev() {
            if let Some((_, id)) = scope.iter().rev().find(|(n, _)| n == name) {
                return Some(*id);
            }
        }
        ctx.contract.state_var(name).map(|v| v.id)
    }

    fn visible(&self, ctx: &Ctx) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = ctx.contract.state_vars.iter().map(|v| v.id).collect();
        for scope in &ctx.scopes {
            out.extend(scope.iter().map(|(_, id)| *id));
        }
        out
    }

    fn expect(&mut self, got: Option<ElementaryType>, want: ElementaryType, span: Span, what: &str) {
        if let Some(got) = got {
            if got != want {
                self.error(Code::E0102, span, format!("{what} must be {}, found {}", vt(want), vt(got)));
            }
        }
    }

    fn stmt(&mut self, ctx: &mut Ctx, s: &Stmt) {
        self.info.owners.insert(s.id, ctx.owner);
        match &s.kind {
            StmtKind::VarDecl { ty, name, init } => {
                if let Some(e) = init {
                    let got = self.expr(ctx, e);
                    self.expect(got, *ty, e.span, &format!("initializer of `{}`", name.name));
                }
                let redeclared = ctx.scopes.iter().any(|sc| sc.iter().any(|(n, _)| n == &name.name));
                if redeclared {
                    self.error(Code::E0104, name.span, format!("`{}` is already declared in this function", name.name));
                }
                self.info.vars.insert(
                    s.id,
                    VarInfo {
                        decl: s.id,
                        name: name.name.clone(),
                        ty: VarType::Value(*ty),
                        scope: VarScope::Local,
                        constant: false,
                        kind: VarKind::Local,
                        owner: Some(ctx.owner),
                        has_init: init.is_some(),
                    },
                );
                ctx.scopes.last_mut().expect("scope").push((name.name.clone(), s.id));
            }
            StmtKind::Assign { target, op, value } => {
                let tt = self.lvalue(ctx, target);
                let vtpe = self.expr(ctx, value);
                if let (Some(tt), Some(vtpe)) = (tt, vtpe) {
                    if tt != vtpe {
                        self.error(
                            Code::E0102,
                            value.span,
                            format!("cannot assign {} to {}", vt(vtpe), vt(tt)),
                        );
                    } else if op.binary().is_some() && tt != ElementaryType::Uint {
                        self.error(
                            Code::E0102,
                            s.span,
                            format!("`{}` requires uint operands, found {}", op.symbol(), vt(tt)),
                        );
                    }
                }
            }
            StmtKind::If { cond, then_block, else_block } => {
                let got = self.expr(ctx, cond);
                self.expect(got, ElementaryType::Bool, cond.span, "condition");
                self.block(ctx, then_block);
                if let Some(b) = else_block {
                    self.block(ctx, b);
                }
            }
            StmtKind::While { cond, body } => {
                let got = self.expr(ctx, cond);
                self.expect(got, ElementaryType::Bool, cond.span, "condition");
                ctx.loop_depth += 1;
                self.block(ctx, body);
                ctx.loop_depth -= 1;
            }
            StmtKind::Return(value) => {
                let got = value.as_ref().and_then(|e| self.expr(ctx, e));
                match (ctx.returns, value) {
                    (Some(want), Some(e)) => self.expect(got, want, e.span, "return value"),
                    (Some(want), None) => self.error(
                        Code::E0107,
                        s.span,
                        format!("function returns {}; `return` needs a value", vt(want)),
                    ),
                    (None, Some(e)) => {
                        self.error(Code::E0107, e.span, "this function does not return a value")
                    }
                    (None, None) => {}
                }
            }
            StmtKind::Break | StmtKind::Continue => {
                if ctx.loop_depth == 0 {
                    self.error(Code::E0107, s.span, "`break` and `continue` are only allowed inside loops");
                }
            }
            StmtKind::Placeholder => {
                if ctx.is_modifier {
                    ctx.placeholders += 1;
                } else {
                    self.error(Code::E0107, s.span, "`_` is only allowed inside modifiers");
                }
            }
            StmtKind::Expr(e) => {
                let effectful = matches!(
                    &e.kind,
                    ExprKind::Call { .. } | ExprKind::Unary { op: UnaryOp::PostInc | UnaryOp::PostDec, .. }
                );
                self.expr_any(ctx, e);
                if !effectful {
                    self.diags.push(Diagnostic::warning(Code::W0001, e.span, "statement has no effect"));
                }
            }
            StmtKind::Emit { event, args } => {
                Effects::note(&mut ctx.effects.write, s.span);
                let decl = ctx.contract.event(&event.name);
                let types: Vec<_> = args.iter().map(|a| self.expr(ctx, a)).collect();
                match decl {
                    None => self.error(Code::E0101, event.span, format!("unknown event `{}`", event.name)),
                    Some(decl) => {
                        if decl.params.len() != args.len() {
                            self.error(
                                Code::E0105,
                                s.span,
                                format!(
                                    "event `{}` takes {} argument(s), {} given",
                                    event.name,
                                    decl.params.len(),
                                    args.len()
                                ),
                            );
                        }
                        for ((p, a), t) in decl.params.iter().zip(args).zip(types) {
                            self.expect(t, p.ty, a.span, "event argument");
                        }
                    }
                }
            }
            StmtKind::Require { cond, message } => {
                let got = self.expr(ctx, cond);
                self.expect(got, ElementaryType::Bool, cond.span, "require condition");
                if let Some(m) = message {
                    let got = self.expr(ctx, m);
                    self.expect(got, ElementaryType::String, m.span, "require message");
                }
            }
            StmtKind::Assert(cond) => {
                let got = self.expr(ctx, cond);
                self.expect(got, ElementaryType::Bool, cond.span, "assert condition");
            }
            StmtKind::Transfer { to, amount } => {
                Effects::note(&mut ctx.effects.write, s.span);
                let got = self.expr(ctx, to);
                self.expect(got, ElementaryType::Address, to.span, "transfer recipient");
                let got = self.expr(ctx, amount);
                self.expect(got, ElementaryType::Uint, amount.span, "transfer amount");
            }
        }
    }

    /// Type an assignment target and record the write.
    fn lvalue(&mut self, ctx: &mut Ctx, e: &Expr) -> Option<ElementaryType> {
        match &e.kind {
            ExprKind::Ident(name) => {
                let t = self.expr(ctx, e)?;
                let decl = self.lookup(ctx, name)?;
                let (constant, scope) = {
                    let var = &self.info.vars[&decl];
                    (var.constant, var.scope)
                };
                if constant {
                    self.error(Code::E0106, e.span, format!("cannot assign to constant `{name}`"));
                }
                if scope == VarScope::State {
                    Effects::note(&mut ctx.effects.write, e.span);
                }
                Some(t)
            }
            ExprKind::Index { .. } => {
                let t = self.expr(ctx, e)?;
                Effects::note(&mut ctx.effects.write, e.span);
                Some(t)
            }
            _ => {
                self.expr_any(ctx, e);
                self.error(Code::E0106, e.span, "expression is not assignable");
                None
            }
        }
    }

    /// Type an expression in statement position, where a void call is fine.
    fn expr_any(&mut self, ctx: &mut Ctx, e: &Expr) {
        if let ExprKind::Call { .. } = &e.kind {
            self.call(ctx, e, true);
        } else {
            self.expr(ctx, e);
        }
    }

    fn expr(&mut self, ctx: &mut Ctx, e: &Expr) -> Option<ElementaryType> {
        self.info.owners.insert(e.id, ctx.owner);
        let t = self.expr_inner(ctx, e)?;
        self.info.expr_types.insert(e.id, t);
        Some(t)
    }

    fn expr_inner(&mut self, ctx: &mut Ctx, e: &Expr) -> Option<ElementaryType> {
        use ElementaryType as T;
        match &e.kind {
            ExprKind::Int(_) => Some(T::Uint),
            ExprKind::Bool(_) => Some(T::Bool),
            ExprKind::Str(_) => Some(T::String),
            ExprKind::Address(_) => Some(T::Address),
            ExprKind::Builtin(b) => {
                match b {
                    Builtin::MsgValue => Effects::note(&mut ctx.effects.value, e.span),
                    _ => Effects::note(&mut ctx.effects.env, e.span),
                }
                Some(match b {
                    Builtin::MsgSender | Builtin::TxOrigin => T::Address,
                    Builtin::MsgValue | Builtin::BlockTimestamp => T::Uint,
                })
            }
            ExprKind::Ident(_) => match self.ident(ctx, e)? {
                VarType::Value(t) => Some(t),
                VarType::Mapping(_) => {
                    self.error(Code::E0102, e.span, "a mapping can only be used with an index");
                    None
                }
            },
            ExprKind::Index { base, key } => {
                let kt = self.expr(ctx, key);
                self.expect(kt, T::Address, key.span, "mapping key");
                if !matches!(base.kind, ExprKind::Ident(_)) {
                    self.expr(ctx, base);
                    self.error(Code::E0102, base.span, "only mappings can be indexed");
                    return None;
                }
                match self.ident(ctx, base)? {
                    VarType::Mapping(v) => Some(v),
                    VarType::Value(t) => {
                        self.error(Code::E0102, base.span, format!("cannot index a value of type {}", vt(t)));
                        None
                    }
                }
            }
            ExprKind::Call { .. } => self.call(ctx, e, false),
            ExprKind::Unary { op, operand } => match op {
                UnaryOp::Neg => {
                    let t = self.expr(ctx, operand);
                    self.expect(t, T::Uint, operand.span, "operand of `-`");
                    t.filter(|t| *t == T::Uint)
                }
                UnaryOp::Not => {
                    let t = self.expr(ctx, operand);
                    self.expect(t, T::Bool, operand.span, "operand of `!`");
                    t.filter(|t| *t == T::Bool)
                }
                UnaryOp::PostInc | UnaryOp::PostDec => {
                    let t = self.lvalue(ctx, operand);
                    self.expect(t, T::Uint, operand.span, &format!("operand of `{}`", op.symbol()));
                    t.filter(|t| *t == T::Uint)
                }
            },
            ExprKind::Binary { op, lhs, rhs } => {
                let lt = self.expr(ctx, lhs);
                let rt = self.expr(ctx, rhs);
                let (lt, rt) = (lt?, rt?);
                let sym = op.symbol();
                match op.category() {
                    OpCategory::Arithmetic => {
                        if lt != T::Uint || rt != T::Uint {
                            self.error(
                                Code::E0102,
                                e.span,
                                format!("`{sym}` is not defined for {} and {}", vt(lt), vt(rt)),
                            );
                            return None;
                        }
                        Some(T::Uint)
                    }
                    OpCategory::Logical => {
                        if lt != T::Bool || rt != T::Bool {
                            self.error(
                                Code::E0102,
                                e.span,
                                format!("`{sym}` is not defined for {} and {}", vt(lt), vt(rt)),
                            );
                            return None;
                        }
                        Some(T::Bool)
                    }
                    OpCategory::Relational => {
                        let ok = match op {
                            BinaryOp::Eq | BinaryOp::Ne => lt == rt && lt != T::String,
                            _ => lt == T::Uint && rt == T::Uint,
                        };
                        if !ok {
                            self.error(
                                Code::E0102,
                                e.span,
                                format!("`{sym}` is not defined for {} and {}", vt(lt), vt(rt)),
                            );
                            return None;
                        }
                        Some(T::Bool)
                    }
                }
            }
        }
    }

    fn ident(&mut self, ctx: &mut Ctx, e: &Expr) -> Option<VarType> {
        let ExprKind::Ident(name) = &e.kind else { return None };
        self.info.owners.insert(e.id, ctx.owner);
        let Some(decl) = self.lookup(ctx, name) else {
            let msg = if ctx.contract.function(name).is_some() {
                format!("function `{name}` used as a value")
            } else {
                format!("unknown identifier `{name}`")
            };
            self.error(Code::E0101, e.span, msg);
            return None;
        };
        let visible = self.visible(ctx);
        self.info.bindings.insert(e.id, decl);
        self.info.visible.insert(e.id, visible);
        let var = &self.info.vars[&decl];
        if var.scope == VarScope::State && !var.constant {
            Effects::note(&mut ctx.effects.read, e.span);
        }
        Some(var.ty)
    }

    fn call(&mut self, ctx: &mut Ctx, e: &Expr, void_ok: bool) -> Option<ElementaryType> {
        let ExprKind::Call { callee, args } = &e.kind else { return None };
        self.info.owners.insert(e.id, ctx.owner);
        let arg_types: Vec<_> = args.iter().map(|a| self.expr(ctx, a)).collect();
        let Some(index) =
            ctx.contract.functions.iter().position(|f| !f.is_constructor && f.name.name == callee.name)
        else {
            self.error(Code::E0101, callee.span, format!("unknown function `{}`", callee.name));
            return None;
        };
        let f = &ctx.contract.functions[index];
        self.info.calls.insert(e.id, index);
        if f.visibility == Visibility::External {
            self.error(
                Code::E0108,
                callee.span,
                format!("external function `{}` cannot be called internally", callee.name),
            );
        }
        if f.params.len() != args.len() {
            self.error(
                Code::E0105,
                e.span,
                format!("`{}` takes {} argument(s), {} given", callee.name, f.params.len(), args.len()),
            );
        }
        for ((p, a), t) in f.params.iter().zip(args).zip(arg_types) {
            self.expect(t, p.ty, a.span, "argument");
        }
        match f.mutability {
            Mutability::Pure => {}
            Mutability::View => Effects::note(&mut ctx.effects.read, e.span),
            Mutability::Payable | Mutability::Nonpayable => Effects::note(&mut ctx.effects.write, e.span),
        }
        match f.returns {
            Some(t) => Some(t),
            None if void_ok => None,
            None => {
                self.error(Code::E0102, e.span, format!("`{}` does not return a value", callee.name));
                None
            }
        }
    }
}
