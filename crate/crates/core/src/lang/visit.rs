//! Traversal helpers over the syntax tree.

use super::ast::*;

/// Read-only traversal in document order. Override a hook and call the
/// matching `walk_*` function to keep descending.
pub trait Visitor {
    fn visit_contract(&mut self, c: &ContractDecl) {
        walk_contract(self, c);
    }
    fn visit_state_var(&mut self, v: &StateVarDecl) {
        if let Some(init) = &v.init {
            self.visit_expr(init);
        }
    }
    fn visit_modifier(&mut self, m: &ModifierDecl) {
        self.visit_block(&m.body);
    }
    fn visit_function(&mut self, f: &FunctionDecl) {
        walk_function(self, f);
    }
    fn visit_modifier_invocation(&mut self, m: &ModifierInvocation) {
        for a in &m.args {
            self.visit_expr(a);
        }
    }
    fn visit_block(&mut self, b: &Block) {
        for s in &b.stmts {
            self.visit_stmt(s);
        }
    }
    fn visit_stmt(&mut self, s: &Stmt) {
        walk_stmt(self, s);
    }
    fn visit_expr(&mut self, e: &Expr) {
        walk_expr(self, e);
    }
}

pub fn walk_unit<V: Visitor + ?Sized>(v: &mut V, unit: &SourceUnit) {
    for c in &unit.contracts {
        v.visit_contract(c);
    }
}

pub fn walk_contract<V: Visitor + ?Sized>(v: &mut V, c: &ContractDecl) {
    for s in &c.state_vars {
        v.visit_state_var(s);
    }
    for m in &c.modifiers {
        v.visit_modifier(m);
    }
    for f in &c.functions {
        v.visit_function(f);
    }
}

pub fn walk_function<V: Visitor + ?Sized>(v: &mut V, f: &FunctionDecl) {
    for m in &f.modifiers {
        v.visit_modifier_invocation(m);
    }
    v.visit_block(&f.body);
}

pub fn walk_stmt<V: Visitor + ?Sized>(v: &mut V, s: &Stmt) {
    match &s.kind {
        StmtKind::VarDecl { init, .. } => {
            if let Some(e) = init {
                v.visit_expr(e);
            }
        }
        StmtKind::Assign { target, value, .. } => {
            v.visit_expr(target);
            v.visit_expr(value);
        }
        StmtKind::If { cond, then_block, else_block } => {
            v.visit_expr(cond);
            v.visit_block(then_block);
            if let Some(b) = else_block {
                v.visit_block(b);
            }
        }
        StmtKind::While { cond, body } => {
            v.visit_expr(cond);
            v.visit_block(body);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                v.visit_expr(e);
            }
        }
        StmtKind::Expr(e) | StmtKind::Assert(e) => v.visit_expr(e),
        StmtKind::Emit { args, .. } => {
            for a in args {
                v.visit_expr(a);
            }
        }
        StmtKind::Require { cond, message } => {
            v.visit_expr(cond);
            if let Some(m) = message {
                v.visit_expr(m);
            }
        }
        StmtKind::Transfer { to, amount } => {
            v.visit_expr(to);
            v.visit_expr(amount);
        }
        StmtKind::Break | StmtKind::Continue | StmtKind::Placeholder => {}
    }
}

pub fn walk_expr<V: Visitor + ?Sized>(v: &mut V, e: &Expr) {
    for c in e.children() {
        v.visit_expr(c);
    }
}

/// Mutable traversal over every node that carries a span and an id.
pub trait VisitorMut {
    fn visit_span(&mut self, _span: &mut Span) {}
    fn visit_id(&mut self, _id: &mut NodeId) {}
    fn visit_ident(&mut self, ident: &mut Ident) {
        self.visit_span(&mut ident.span);
    }
    fn visit_block(&mut self, b: &mut Block) {
        walk_block_mut(self, b);
    }
    fn visit_stmt(&mut self, s: &mut Stmt) {
        walk_stmt_mut(self, s);
    }
    fn visit_expr(&mut self, e: &mut Expr) {
        walk_expr_mut(self, e);
    }
    fn visit_function(&mut self, f: &mut FunctionDecl) {
        walk_function_mut(self, f);
    }
    fn visit_modifier_invocation(&mut self, m: &mut ModifierInvocation) {
        self.visit_id(&mut m.id);
        self.visit_span(&mut m.span);
        self.visit_ident(&mut m.name);
        for a in &mut m.args {
            self.visit_expr(a);
        }
    }
    fn visit_param(&mut self, p: &mut Param) {
        self.visit_id(&mut p.id);
        self.visit_span(&mut p.span);
        self.visit_ident(&mut p.name);
    }
}

pub fn walk_unit_mut<V: VisitorMut + ?Sized>(v: &mut V, unit: &mut SourceUnit) {
    v.visit_span(&mut unit.span);
    for c in &mut unit.contracts {
        v.visit_id(&mut c.id);
        v.visit_span(&mut c.span);
        v.visit_ident(&mut c.name);
        for s in &mut c.state_vars {
            v.visit_id(&mut s.id);
            v.visit_span(&mut s.span);
            v.visit_ident(&mut s.name);
            if let Some(e) = &mut s.init {
                v.visit_expr(e);
            }
        }
        for ev in &mut c.events {
            v.visit_id(&mut ev.id);
            v.visit_span(&mut ev.span);
            v.visit_ident(&mut ev.name);
            for p in &mut ev.params {
                v.visit_param(p);
            }
        }
        for m in &mut c.modifiers {
            v.visit_id(&mut m.id);
            v.visit_span(&mut m.span);
            v.visit_ident(&mut m.name);
            for p in &mut m.params {
                v.visit_param(p);
            }
            v.visit_block(&mut m.body);
        }
        for f in &mut c.functions {
            v.visit_function(f);
        }
    }
}

pub fn walk_function_mut<V: VisitorMut + ?Sized>(v: &mut V, f: &mut FunctionDecl) {
    v.visit_id(&mut f.id);
    v.visit_span(&mut f.span);
    v.visit_span(&mut f.header_span);
    v.visit_ident(&mut f.name);
    for p in &mut f.params {
        v.visit_param(p);
    }
    for m in &mut f.modifiers {
        v.visit_modifier_invocation(m);
    }
    v.visit_block(&mut f.body);
}

pub fn walk_block_mut<V: VisitorMut + ?Sized>(v: &mut V, b: &mut Block) {
    v.visit_id(&mut b.id);
    v.visit_span(&mut b.span);
    for s in &mut b.stmts {
        v.visit_stmt(s);
    }
}

pub fn walk_stmt_mut<V: VisitorMut + ?Sized>(v: &mut V, s: &mut Stmt) {
    v.visit_id(&mut s.id);
    v.visit_span(&mut s.span);
    match &mut s.kind {
        StmtKind::VarDecl { name, init, .. } => {
            v.visit_ident(name);
            if let Some(e) = init {
                v.visit_expr(e);
            }
        }
        StmtKind::Assign { target, value, .. } => {
            v.visit_expr(target);
            v.visit_expr(value);
        }
        StmtKind::If { cond, then_block, else_block } => {
            v.visit_expr(cond);
            v.visit_block(then_block);
            if let Some(b) = else_block {
                v.visit_block(b);
            }
        }
        StmtKind::While { cond, body } => {
            v.visit_expr(cond);
            v.visit_block(body);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                v.visit_expr(e);
            }
        }
        StmtKind::Expr(e) | StmtKind::Assert(e) => v.visit_expr(e),
        StmtKind::Emit { event, args } => {
            v.visit_ident(event);
            for a in args {
                v.visit_expr(a);
            }
        }
        StmtKind::Require { cond, message } => {
            v.visit_expr(cond);
            if let Some(m) = message {
                v.visit_expr(m);
            }
        }
        StmtKind::Transfer { to, amount } => {
            v.visit_expr(to);
            v.visit_expr(amount);
        }
        StmtKind::Break | StmtKind::Continue | StmtKind::Placeholder => {}
    }
}

pub fn walk_expr_mut<V: VisitorMut + ?Sized>(v: &mut V, e: &mut Expr) {
    v.visit_id(&mut e.id);
    v.visit_span(&mut e.span);
    match &mut e.kind {
        ExprKind::Binary { lhs, rhs, .. } => {
            v.visit_expr(lhs);
            v.visit_expr(rhs);
        }
        ExprKind::Unary { operand, .. } => v.visit_expr(operand),
        ExprKind::Index { base, key } => {
            v.visit_expr(base);
            v.visit_expr(key);
        }
        ExprKind::Call { callee, args } => {
            v.visit_ident(callee);
            for a in args {
                v.visit_expr(a);
            }
        }
        _ => {}
    }
}

struct Eraser;

impl VisitorMut for Eraser {
    fn visit_span(&mut self, span: &mut Span) {
        *span = Span::default();
    }
    fn visit_id(&mut self, id: &mut NodeId) {
        *id = NodeId::default();
    }
}

/// Reset every span and node id so that derived equality is structural.
pub fn erase_positions(unit: &mut SourceUnit) {
    walk_unit_mut(&mut Eraser, unit);
}
