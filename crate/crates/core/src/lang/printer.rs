//! Canonical pretty printer: four-space indent, one statement per line.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";
const PREFIX_PREC: u8 = 7;
const POSTFIX_PREC: u8 = 8;

pub fn print(unit: &SourceUnit) -> String {
    let mut p = Printer { out: String::new(), depth: 0 };
    for (i, c) in unit.contracts.iter().enumerate() {
        if i > 0 {
            p.out.push('\n');
        }
        p.contract(c);
    }
    p.out
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

/// Header line of a function without the trailing ` {`.
pub fn function_header(f: &FunctionDecl) -> String {
    let mut s = String::new();
    if f.is_constructor {
        s.push_str("constructor(");
    } else {
        let _ = write!(s, "function {}(", f.name.name);
    }
    s.push_str(&params(&f.params));
    s.push(')');
    if !f.is_constructor {
        s.push(' ');
        s.push_str(f.visibility.keyword());
    }
    if f.mutability != Mutability::Nonpayable {
        s.push(' ');
        s.push_str(f.mutability.keyword());
    }
    for m in &f.modifiers {
        s.push(' ');
        s.push_str(&modifier_invocation(m));
    }
    if let Some(r) = f.returns {
        let _ = write!(s, " returns ({})", r.keyword());
    }
    s
}

pub fn modifier_invocation(m: &ModifierInvocation) -> String {
    if m.args.is_empty() {
        m.name.name.clone()
    } else {
        format!("{}({})", m.name.name, exprs(&m.args))
    }
}

fn params(ps: &[Param]) -> String {
    ps.iter().map(|p| format!("{} {}", p.ty.keyword(), p.name.name)).collect::<Vec<_>>().join(", ")
}

fn exprs(es: &[Expr]) -> String {
    es.iter().map(print_expr).collect::<Vec<_>>().join(", ")
}

pub fn quote_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    match &e.kind {
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Str(s) => out.push_str(&quote_string(s)),
        ExprKind::Address(a) => out.push_str(&format_address(*a)),
        ExprKind::Ident(name) => out.push_str(name),
        ExprKind::Builtin(b) => out.push_str(b.text()),
        ExprKind::Call { callee, args } => {
            let _ = write!(out, "{}({})", callee.name, exprs(args));
        }
        ExprKind::Index { base, key } => {
            write_expr(out, base, POSTFIX_PREC);
            out.push('[');
            write_expr(out, key, 0);
            out.push(']');
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            let wrap = prec < min_prec;
            if wrap {
                out.push('(');
            }
            write_expr(out, lhs, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, rhs, prec + 1);
            if wrap {
                out.push(')');
            }
        }
        ExprKind::Unary { op, operand } if op.is_postfix() => {
            let wrap = POSTFIX_PREC < min_prec;
            if wrap {
                out.push('(');
            }
            write_expr(out, operand, POSTFIX_PREC);
            out.push_str(op.symbol());
            if wrap {
                out.push(')');
            }
        }
        ExprKind::Unary { op, operand } => {
            let wrap = PREFIX_PREC < min_prec;
            if wrap {
                out.push('(');
            }
            out.push_str(op.symbol());
            let nested_prefix =
                matches!(&operand.kind, ExprKind::Unary { op, .. } if !op.is_postfix());
            if nested_prefix {
                out.push('(');
                write_expr(out, operand, 0);
                out.push(')');
            } else {
                write_expr(out, operand, PREFIX_PREC);
            }
            if wrap {
                out.push(')');
            }
        }
    }
}

/// Text of a simple statement as printed on its own line (no indentation).
pub fn simple_stmt(s: &Stmt) -> Option<String> {
    Some(match &s.kind {
        StmtKind::VarDecl { ty, name, init } => match init {
            Some(e) => format!("{} {} = {};", ty.keyword(), name.name, print_expr(e)),
            None => format!("{} {};", ty.keyword(), name.name),
        },
        StmtKind::Assign { target, op, value } => {
            format!("{} {} {};", print_expr(target), op.symbol(), print_expr(value))
        }
        StmtKind::Return(None) => "return;".into(),
        StmtKind::Return(Some(e)) => format!("return {};", print_expr(e)),
        StmtKind::Break => "break;".into(),
        StmtKind::Continue => "continue;".into(),
        StmtKind::Placeholder => "_;".into(),
        StmtKind::Expr(e) => format!("{};", print_expr(e)),
        StmtKind::Emit { event, args } => format!("emit {}({});", event.name, exprs(args)),
        StmtKind::Require { cond, message: None } => format!("require({});", print_expr(cond)),
        StmtKind::Require { cond, message: Some(m) } => {
            format!("require({}, {});", print_expr(cond), print_expr(m))
        }
        StmtKind::Assert(e) => format!("assert({});", print_expr(e)),
        StmtKind::Transfer { to, amount } => {
            format!("transfer({}, {});", print_expr(to), print_expr(amount))
        }
        StmtKind::If { .. } | StmtKind::While { .. } => return None,
    })
}

struct Printer {
    out: String,
    depth: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn contract(&mut self, c: &ContractDecl) {
        self.line(&format!("contract {} {{", c.name.name));
        self.depth += 1;
        for v in &c.state_vars {
            let mut s = v.ty.to_string();
            if v.constant {
                s.push_str(" constant");
            }
            let _ = write!(s, " {}", v.name.name);
            if let Some(e) = &v.init {
                let _ = write!(s, " = {}", print_expr(e));
            }
            s.push(';');
            self.line(&s);
        }
        for e in &c.events {
            self.line(&format!("event {}({});", e.name.name, params(&e.params)));
        }
        let mut first = c.state_vars.is_empty() && c.events.is_empty();
        for m in &c.modifiers {
            if !first {
                self.out.push('\n');
            }
            first = false;
            if m.params.is_empty() {
                self.line(&format!("modifier {} {{", m.name.name));
            } else {
                self.line(&format!("modifier {}({}) {{", m.name.name, params(&m.params)));
            }
            self.block_body(&m.body);
            self.line("}");
        }
        for f in &c.functions {
            if !first {
                self.out.push('\n');
            }
            first = false;
            self.line(&format!("{} {{", function_header(f)));
            self.block_body(&f.body);
            self.line("}");
        }
        self.depth -= 1;
        self.line("}");
    }

    fn block_body(&mut self, b: &Block) {
        self.depth += 1;
        for s in &b.stmts {
            self.stmt(s);
        }
        self.depth -= 1;
    }

    fn stmt(&mut self, s: &Stmt) {
        if let Some(text) = simple_stmt(s) {
            self.line(&text);
            return;
        }
        match &s.kind {
            StmtKind::If { cond, then_block, else_block } => {
                self.line(&format!("if({}) {{", print_expr(cond)));
                self.if_tail(then_block, else_block.as_ref());
            }
            StmtKind::While { cond, body } => {
                self.line(&format!("while({}) {{", print_expr(cond)));
                self.block_body(body);
                self.line("}");
            }
            _ => unreachable!("simple statements handled above"),
        }
    }

    fn if_tail(&mut self, then_block: &Block, else_block: Option<&Block>) {
        self.block_body(then_block);
        match else_block {
            None => self.line("}"),
            Some(b) => match b.stmts.as_slice() {
                [Stmt { kind: StmtKind::If { cond, then_block, else_block }, .. }] => {
                    self.line(&format!("}} else if({}) {{", print_expr(cond)));
                    self.if_tail(then_block, else_block.as_ref());
                }
                _ => {
                    self.line("} else {");
                    self.block_body(b);
                    self.line("}");
                }
            },
        }
    }
}
