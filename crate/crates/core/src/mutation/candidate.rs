//! Candidate sites and their replacement pools.

use serde::Serialize;

use super::operator::Operator;
use crate::lang::printer::{function_header, modifier_invocation, print_expr, simple_stmt};
use crate::lang::*;

/// Address used by `LR_A` in addition to the literals of the unit.
pub const ATTACKER_ADDRESS: u64 = 0xdead;

/// What a candidate points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Site {
    Stmt { id: NodeId },
    Expr { id: NodeId },
    Param { owner: NodeId, index: usize },
    Modifier { function: NodeId, index: usize },
    Qualifier { function: NodeId },
}

/// One concrete single-site change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Edit {
    ReplaceExpr { id: NodeId, kind: ExprKind },
    ReplaceStmt { id: NodeId, kind: StmtKind },
    DeleteStmt { id: NodeId },
    /// Swap the initializers of two local declarations.
    SwapInit { a: NodeId, b: NodeId },
    SwapParams { owner: NodeId, i: usize, j: usize },
    DeleteModifier { function: NodeId, index: usize },
    RenameModifier { function: NodeId, index: usize, name: String },
    SetVisibility { function: NodeId, visibility: Visibility },
    SetMutability { function: NodeId, mutability: Mutability },
}

/// A replacement together with the fragment texts used in reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replacement {
    pub edit: Edit,
    pub original: String,
    pub mutated: String,
}

/// Type, scope and constancy of an identifier site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentMeta {
    pub name: String,
    pub ty: String,
    pub state: bool,
    pub constant: bool,
}

#[derive(Debug, Clone)]
pub struct MutationCandidate {
    pub site: Site,
    pub span: Span,
    /// Every operator defined on this kind of node, in catalog order.
    pub operators: Vec<Operator>,
    /// Enclosing function or modifier name.
    pub function: Option<String>,
    pub ident: Option<IdentMeta>,
    /// Replacement pool per operator; pools may be empty.
    pub pools: Vec<(Operator, Vec<Replacement>)>,
}

impl MutationCandidate {
    pub fn pool(&self, op: Operator) -> &[Replacement] {
        self.pools.iter().find(|(o, _)| *o == op).map(|(_, p)| p.as_slice()).unwrap_or(&[])
    }

    /// Operators whose pool is non-empty.
    pub fn effective_operators(&self) -> Vec<Operator> {
        self.pools.iter().filter(|(_, p)| !p.is_empty()).map(|(o, _)| *o).collect()
    }
}

/// All candidate sites of a checked unit, in document order.
pub fn collect_candidates(unit: &CheckedUnit) -> Vec<MutationCandidate> {
    let c = unit.contract();
    let mut col = Collector {
        unit,
        contract: c,
        out: Vec::new(),
        owner: None,
        owner_name: None,
        returns: None,
        loop_depth: 0,
        address_literals: Vec::new(),
    };
    col.address_literals = address_literals(c);
    for v in &c.state_vars {
        if let Some(init) = &v.init {
            col.owner_name = None;
            col.expr(init, false);
        }
    }
    for m in &c.modifiers {
        col.enter(m.id, &m.name.name, None);
        col.params(m.id, &m.params);
        col.block(&m.body);
    }
    for f in &c.functions {
        let name = if f.is_constructor { "constructor" } else { f.name.name.as_str() };
        col.enter(f.id, name, f.returns);
        col.qualifiers(f);
        col.params(f.id, &f.params);
        for (index, inv) in f.modifiers.iter().enumerate() {
            col.modifier(f, index, inv);
            for a in &inv.args {
                col.expr(a, false);
            }
        }
        col.block(&f.body);
    }
    let mut out = col.out;
    out.sort_by_key(|c| c.span.start);
    out
}

fn address_literals(c: &ContractDecl) -> Vec<u64> {
    struct Lits(Vec<u64>);
    impl visit::Visitor for Lits {
        fn visit_expr(&mut self, e: &Expr) {
            if let ExprKind::Address(a) = e.kind {
                if !self.0.contains(&a) {
                    self.0.push(a);
                }
            }
            visit::walk_expr(self, e);
        }
    }
    let mut l = Lits(Vec::new());
    visit::Visitor::visit_contract(&mut l, c);
    l.0
}

struct Collector<'a> {
    unit: &'a CheckedUnit,
    contract: &'a ContractDecl,
    out: Vec<MutationCandidate>,
    owner: Option<NodeId>,
    owner_name: Option<String>,
    returns: Option<ElementaryType>,
    loop_depth: usize,
    address_literals: Vec<u64>,
}

fn repl(edit: Edit, original: impl Into<String>, mutated: impl Into<String>) -> Replacement {
    Replacement { edit, original: original.into(), mutated: mutated.into() }
}

impl<'a> Collector<'a> {
    fn enter(&mut self, owner: NodeId, name: &str, returns: Option<ElementaryType>) {
        self.owner = Some(owner);
        self.owner_name = Some(name.to_string());
        self.returns = returns;
        self.loop_depth = 0;
    }

    fn push(&mut self, site: Site, span: Span, pools: Vec<(Operator, Vec<Replacement>)>, ident: Option<IdentMeta>) {
        if pools.is_empty() {
            return;
        }
        self.out.push(MutationCandidate {
            site,
            span,
            operators: pools.iter().map(|(o, _)| *o).collect(),
            function: self.owner_name.clone(),
            ident,
            pools,
        });
    }

    fn qualifiers(&mut self, f: &FunctionDecl) {
        let before = function_header(f);
        let mut pool = Vec::new();
        if !f.is_constructor {
            for v in Visibility::ALL.into_iter().filter(|v| *v != f.visibility) {
                let mut g = f.clone();
                g.visibility = v;
                pool.push(repl(Edit::SetVisibility { function: f.id, visibility: v }, &before, function_header(&g)));
            }
        }
        for m in Mutability::ALL.into_iter().filter(|m| *m != f.mutability) {
            let mut g = f.clone();
            g.mutability = m;
            pool.push(repl(Edit::SetMutability { function: f.id, mutability: m }, &before, function_header(&g)));
        }
        self.push(Site::Qualifier { function: f.id }, f.header_span, vec![(Operator::QRD, pool)], None);
    }

    fn params(&mut self, owner: NodeId, params: &[Param]) {
        for (i, p) in params.iter().enumerate() {
            let pool = params
                .iter()
                .enumerate()
                .filter(|(j, q)| *j != i && q.ty == p.ty)
                .map(|(j, q)| {
                    repl(
                        Edit::SwapParams { owner, i, j },
                        format!("{} {}, {} {}", p.ty.keyword(), p.name.name, q.ty.keyword(), q.name.name),
                        format!("{} {}, {} {}", q.ty.keyword(), q.name.name, p.ty.keyword(), p.name.name),
                    )
                })
                .collect();
            self.push(Site::Param { owner, index: i }, p.span, vec![(Operator::VDTSCS, pool)], None);
        }
    }

    fn modifier(&mut self, f: &FunctionDecl, index: usize, inv: &ModifierInvocation) {
        let text = modifier_invocation(inv);
        let mut pool = vec![repl(Edit::DeleteModifier { function: f.id, index }, &text, "")];
        for m in &self.contract.modifiers {
            if m.name.name != inv.name.name && m.params.len() == inv.args.len() {
                let mut renamed = inv.clone();
                renamed.name.name = m.name.name.clone();
                pool.push(repl(
                    Edit::RenameModifier { function: f.id, index, name: m.name.name.clone() },
                    &text,
                    modifier_invocation(&renamed),
                ));
            }
        }
        self.push(Site::Modifier { function: f.id, index }, inv.span, vec![(Operator::MORD, pool)], None);
    }

    fn block(&mut self, b: &Block) {
        for s in &b.stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        let text = simple_stmt(s).unwrap_or_default();
        let delete = || repl(Edit::DeleteStmt { id: s.id }, &text, "");
        match &s.kind {
            StmtKind::VarDecl { ty, init, .. } => {
                let pool = match init {
                    Some(_) => self.declaration_swaps(s, *ty),
                    None => Vec::new(),
                };
                if init.is_some() {
                    self.push(Site::Stmt { id: s.id }, s.span, vec![(Operator::VDTSCS, pool)], None);
                }
                if let Some(e) = init {
                    self.expr(e, false);
                }
            }
            StmtKind::Assign { target, op, value } => {
                let aor = AssignOp::ALL
                    .into_iter()
                    .filter(|o| o != op)
                    .map(|o| {
                        let kind = StmtKind::Assign { target: target.clone(), op: o, value: value.clone() };
                        let shown = simple_stmt(&Stmt { id: s.id, kind: kind.clone(), span: s.span }).unwrap_or_default();
                        repl(Edit::ReplaceStmt { id: s.id, kind }, &text, shown)
                    })
                    .collect();
                self.push(
                    Site::Stmt { id: s.id },
                    s.span,
                    vec![(Operator::AOR, aor), (Operator::ESD, vec![delete()])],
                    None,
                );
                self.expr(target, true);
                self.expr(value, false);
            }
            StmtKind::If { cond, then_block, else_block } => {
                self.expr(cond, false);
                self.block(then_block);
                if let Some(b) = else_block {
                    self.block(b);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond, false);
                self.loop_depth += 1;
                self.block(body);
                self.loop_depth -= 1;
            }
            StmtKind::Return(_) | StmtKind::Break | StmtKind::Continue => {
                let mut pool = vec![delete()];
                let mut alts = Vec::new();
                if self.returns.is_none() {
                    alts.push(StmtKind::Return(None));
                }
                if self.loop_depth > 0 {
                    alts.push(StmtKind::Break);
                    alts.push(StmtKind::Continue);
                }
                for kind in alts {
                    if std::mem::discriminant(&kind) == std::mem::discriminant(&s.kind) {
                        continue;
                    }
                    let shown = simple_stmt(&Stmt { id: s.id, kind: kind.clone(), span: s.span }).unwrap_or_default();
                    pool.push(repl(Edit::ReplaceStmt { id: s.id, kind }, &text, shown));
                }
                self.push(Site::Stmt { id: s.id }, s.span, vec![(Operator::JSRD, pool)], None);
                if let StmtKind::Return(Some(e)) = &s.kind {
                    self.expr(e, false);
                }
            }
            StmtKind::Expr(_)
            | StmtKind::Emit { .. }
            | StmtKind::Require { .. }
            | StmtKind::Assert(_)
            | StmtKind::Transfer { .. } => {
                self.push(Site::Stmt { id: s.id }, s.span, vec![(Operator::ESD, vec![delete()])], None);
                match &s.kind {
                    StmtKind::Expr(e) | StmtKind::Assert(e) => self.expr(e, false),
                    StmtKind::Emit { args, .. } => {
                        for a in args {
                            self.expr(a, false);
                        }
                    }
                    StmtKind::Require { cond, message } => {
                        self.expr(cond, false);
                        if let Some(m) = message {
                            self.expr(m, false);
                        }
                    }
                    StmtKind::Transfer { to, amount } => {
                        self.expr(to, false);
                        self.expr(amount, false);
                    }
                    _ => {}
                }
            }
            StmtKind::Placeholder => {}
        }
    }

    /// Other initialized declarations of the same type in the same function.
    fn declaration_swaps(&self, s: &Stmt, ty: ElementaryType) -> Vec<Replacement> {
        let StmtKind::VarDecl { init: Some(mine), .. } = &s.kind else { return Vec::new() };
        let mut others = Vec::new();
        collect_decls(self.owner_body(), &mut others);
        others
            .into_iter()
            .filter(|o| o.id != s.id)
            .filter_map(|o| match &o.kind {
                StmtKind::VarDecl { ty: t, init: Some(theirs), .. } if *t == ty && theirs != mine => {
                    let a = simple_stmt(s).unwrap_or_default();
                    let b = simple_stmt(o).unwrap_or_default();
                    let (sa, sb) = swapped(s, o);
                    Some(repl(Edit::SwapInit { a: s.id, b: o.id }, format!("{a} | {b}"), format!("{sa} | {sb}")))
                }
                _ => None,
            })
            .collect()
    }

    fn owner_body(&self) -> Option<&'a Block> {
        let owner = self.owner?;
        let c = self.contract;
        c.functions
            .iter()
            .find(|f| f.id == owner)
            .map(|f| &f.body)
            .or_else(|| c.modifiers.iter().find(|m| m.id == owner).map(|m| &m.body))
    }

    fn expr(&mut self, e: &Expr, lvalue: bool) {
        let here = print_expr(e);
        let replace = |kind: ExprKind| {
            let shown = print_expr(&Expr::new(e.id, kind.clone(), e.span));
            repl(Edit::ReplaceExpr { id: e.id, kind }, &here, shown)
        };
        match &e.kind {
            ExprKind::Int(v) => {
                let mut vals = vec![0, 1];
                if *v > 0 {
                    vals.push(v - 1);
                }
                if *v < u64::MAX {
                    vals.push(v + 1);
                }
                vals.sort_unstable();
                vals.dedup();
                let pool = vals.into_iter().filter(|x| x != v).map(|x| replace(ExprKind::Int(x))).collect();
                self.push(Site::Expr { id: e.id }, e.span, vec![(Operator::LR_I, pool)], None);
            }
            ExprKind::Bool(b) => {
                let pool = vec![replace(ExprKind::Bool(!b))];
                self.push(Site::Expr { id: e.id }, e.span, vec![(Operator::LR_B, pool)], None);
            }
            ExprKind::Str(s) => {
                let mut vals: Vec<String> = Vec::new();
                for x in [String::new(), s.chars().skip(1).collect(), s.chars().rev().collect()] {
                    if x != *s && !vals.contains(&x) {
                        vals.push(x);
                    }
                }
                let pool = vals.into_iter().map(|x| replace(ExprKind::Str(x))).collect();
                self.push(Site::Expr { id: e.id }, e.span, vec![(Operator::LR_S, pool)], None);
            }
            ExprKind::Address(a) => {
                let mut lits = self.address_literals.clone();
                if !lits.contains(&ATTACKER_ADDRESS) {
                    lits.push(ATTACKER_ADDRESS);
                }
                let lr_a = lits.into_iter().filter(|x| x != a).map(|x| replace(ExprKind::Address(x))).collect();
                let rar = self.rvalue_addresses(e).into_iter().map(replace).collect();
                self.push(Site::Expr { id: e.id }, e.span, vec![(Operator::LR_A, lr_a), (Operator::RAR, rar)], None);
            }
            ExprKind::Builtin(Builtin::MsgSender | Builtin::TxOrigin) => {
                let rar = self.rvalue_addresses(e).into_iter().map(replace).collect();
                self.push(Site::Expr { id: e.id }, e.span, vec![(Operator::RAR, rar)], None);
            }
            ExprKind::Builtin(_) => {}
            ExprKind::Ident(name) => {
                let Some(var) = self.unit.info.var_of(e.id) else { return };
                let visible = self.unit.info.visible.get(&e.id).cloned().unwrap_or_default();
                let mut names: Vec<String> = Vec::new();
                for id in visible {
                    let Some(o) = self.unit.info.vars.get(&id) else { continue };
                    if o.name != *name
                        && o.ty == var.ty
                        && o.scope == var.scope
                        && o.constant == var.constant
                        && !names.contains(&o.name)
                    {
                        names.push(o.name.clone());
                    }
                }
                let itscr = names.into_iter().map(|n| replace(ExprKind::Ident(n))).collect();
                let mut pools = vec![(Operator::ITSCR, itscr)];
                if var.scope == VarScope::State && var.ty == VarType::Value(ElementaryType::Address) && !lvalue {
                    let rar = self.rvalue_addresses(e).into_iter().map(replace).collect();
                    pools.push((Operator::RAR, rar));
                }
                let meta = IdentMeta {
                    name: name.clone(),
                    ty: match var.ty {
                        VarType::Value(t) => t.keyword().to_string(),
                        VarType::Mapping(t) => TypeName::Mapping(t).to_string(),
                    },
                    state: var.scope == VarScope::State,
                    constant: var.constant,
                };
                self.push(Site::Expr { id: e.id }, e.span, pools, Some(meta));
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let pool = op
                    .category_members()
                    .iter()
                    .filter(|o| *o != op)
                    .map(|o| replace(ExprKind::Binary { op: *o, lhs: lhs.clone(), rhs: rhs.clone() }))
                    .collect();
                self.push(Site::Expr { id: e.id }, e.span, vec![(Operator::BOR, pool)], None);
                self.expr(lhs, false);
                self.expr(rhs, false);
            }
            ExprKind::Unary { op, operand } => {
                let other = match op {
                    UnaryOp::Neg => UnaryOp::Not,
                    UnaryOp::Not => UnaryOp::Neg,
                    UnaryOp::PostInc => UnaryOp::PostDec,
                    UnaryOp::PostDec => UnaryOp::PostInc,
                };
                let pool = vec![
                    replace(ExprKind::Unary { op: other, operand: operand.clone() }),
                    replace(operand.kind.clone()),
                ];
                self.push(Site::Expr { id: e.id }, e.span, vec![(Operator::UORD, pool)], None);
                self.expr(operand, op.is_postfix());
            }
            ExprKind::Index { base, key } => {
                self.expr(base, lvalue);
                self.expr(key, false);
            }
            ExprKind::Call { args, .. } => {
                for a in args {
                    self.expr(a, false);
                }
            }
        }
    }

    /// Address r-values other than `e`: builtins, address state variables, literals.
    fn rvalue_addresses(&self, e: &Expr) -> Vec<ExprKind> {
        let mut all = vec![ExprKind::Builtin(Builtin::MsgSender), ExprKind::Builtin(Builtin::TxOrigin)];
        for v in &self.contract.state_vars {
            if v.ty == TypeName::Elementary(ElementaryType::Address) {
                all.push(ExprKind::Ident(v.name.name.clone()));
            }
        }
        all.extend(self.address_literals.iter().map(|a| ExprKind::Address(*a)));
        all.retain(|k| *k != e.kind);
        all
    }
}

fn collect_decls<'b>(b: Option<&'b Block>, out: &mut Vec<&'b Stmt>) {
    let Some(b) = b else { return };
    for s in &b.stmts {
        match &s.kind {
            StmtKind::VarDecl { .. } => out.push(s),
            StmtKind::If { then_block, else_block, .. } => {
                collect_decls(Some(then_block), out);
                collect_decls(else_block.as_ref(), out);
            }
            StmtKind::While { body, .. } => collect_decls(Some(body), out),
            _ => {}
        }
    }
}

fn swapped(a: &Stmt, b: &Stmt) -> (String, String) {
    let (StmtKind::VarDecl { init: ia, .. }, StmtKind::VarDecl { init: ib, .. }) = (&a.kind, &b.kind) else {
        return (String::new(), String::new());
    };
    let mut na = a.clone();
    let mut nb = b.clone();
    if let StmtKind::VarDecl { init, .. } = &mut na.kind {
        *init = ib.clone();
    }
    if let StmtKind::VarDecl { init, .. } = &mut nb.kind {
        *init = ia.clone();
    }
    (simple_stmt(&na).unwrap_or_default(), simple_stmt(&nb).unwrap_or_default())
}
