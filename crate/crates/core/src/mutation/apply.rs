use super::candidate::Edit;
use crate::lang::visit::{walk_block_mut, walk_expr_mut, walk_function_mut, walk_unit_mut, VisitorMut};
use crate::lang::*;

/// Copy of `unit` with `edit` applied. Spans and node ids of untouched
/// nodes are preserved.
pub fn apply(unit: &SourceUnit, edit: &Edit) -> SourceUnit {
    let mut out = unit.clone();
    if let Edit::SwapInit { a, b } = edit {
        let ia = find_init(&out, *a);
        let ib = find_init(&out, *b);
        let mut v = Applier { edit, swap: Some((ia, ib)) };
        walk_unit_mut(&mut v, &mut out);
        return out;
    }
    if let Edit::SwapParams { owner, i, j } = edit {
        for c in &mut out.contracts {
            for m in &mut c.modifiers {
                if m.id == *owner {
                    swap_params(&mut m.params, *i, *j);
                }
            }
        }
    }
    let mut v = Applier { edit, swap: None };
    walk_unit_mut(&mut v, &mut out);
    out
}

fn swap_params(ps: &mut [Param], i: usize, j: usize) {
    let (ni, nj) = (ps[i].name.name.clone(), ps[j].name.name.clone());
    ps[i].name.name = nj;
    ps[j].name.name = ni;
}

fn find_init(unit: &SourceUnit, id: NodeId) -> Option<Expr> {
    struct Find(NodeId, Option<Expr>);
    impl visit::Visitor for Find {
        fn visit_stmt(&mut self, s: &Stmt) {
            if s.id == self.0 {
                if let StmtKind::VarDecl { init, .. } = &s.kind {
                    self.1 = init.clone();
                }
            }
            visit::walk_stmt(self, s);
        }
    }
    let mut f = Find(id, None);
    visit::walk_unit(&mut f, unit);
    f.1
}

struct Applier<'e> {
    edit: &'e Edit,
    swap: Option<(Option<Expr>, Option<Expr>)>,
}

impl VisitorMut for Applier<'_> {
    fn visit_block(&mut self, b: &mut Block) {
        if let Edit::DeleteStmt { id } = self.edit {
            b.stmts.retain(|s| s.id != *id);
        }
        walk_block_mut(self, b);
    }

    fn visit_stmt(&mut self, s: &mut Stmt) {
        match self.edit {
            Edit::ReplaceStmt { id, kind } if s.id == *id => s.kind = kind.clone(),
            Edit::SwapInit { a, b } if s.id == *a || s.id == *b => {
                let (ia, ib) = self.swap.clone().unwrap_or_default();
                if let StmtKind::VarDecl { init, .. } = &mut s.kind {
                    *init = if s.id == *a { ib } else { ia };
                }
            }
            _ => {}
        }
        crate::lang::visit::walk_stmt_mut(self, s);
    }

    fn visit_expr(&mut self, e: &mut Expr) {
        if let Edit::ReplaceExpr { id, kind } = self.edit {
            if e.id == *id {
                e.kind = kind.clone();
                return;
            }
        }
        walk_expr_mut(self, e);
    }

    fn visit_function(&mut self, f: &mut FunctionDecl) {
        match self.edit {
            Edit::SwapParams { owner, i, j } if f.id == *owner => swap_params(&mut f.params, *i, *j),
            Edit::DeleteModifier { function, index } if f.id == *function => {
                f.modifiers.remove(*index);
            }
            Edit::RenameModifier { function, index, name } if f.id == *function => {
                f.modifiers[*index].name.name = name.clone();
            }
            Edit::SetVisibility { function, visibility } if f.id == *function => f.visibility = *visibility,
            Edit::SetMutability { function, mutability } if f.id == *function => f.mutability = *mutability,
            _ => {}
        }
        walk_function_mut(self, f);
    }
}
