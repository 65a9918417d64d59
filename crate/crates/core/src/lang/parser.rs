//! Recursive-descent parser. Stops at the first syntax error.

use super::ast::*;
use super::diagnostic::{Code, Diagnostic};
use super::lexer::{tokenize, Tok, Token};

/// Parse `text` (the contents of `file`) into a syntax tree.
pub fn parse(file: &str, text: &str) -> Result<SourceUnit, Vec<Diagnostic>> {
    let tokens = tokenize(text).map_err(|d| vec![d])?;
    let mut p = Parser { tokens, pos: 0, next_id: 0 };
    p.unit(file).map_err(|d| vec![d])
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    next_id: u32,
}

fn elementary_keyword(name: &str) -> Option<ElementaryType> {
    match name {
        "uint" => Some(ElementaryType::Uint),
        "bool" => Some(ElementaryType::Bool),
        "address" => Some(ElementaryType::Address),
        "string" => Some(ElementaryType::String),
        _ => None,
    }
}

fn visibility_keyword(name: &str) -> Option<Visibility> {
    match name {
        "public" => Some(Visibility::Public),
        "external" => Some(Visibility::External),
        "internal" => Some(Visibility::Internal),
        "private" => Some(Visibility::Private),
        _ => None,
    }
}

fn mutability_keyword(name: &str) -> Option<Mutability> {
    match name {
        "pure" => Some(Mutability::Pure),
        "view" => Some(Mutability::View),
        "payable" => Some(Mutability::Payable),
        _ => None,
    }
}

const RESERVED: &[&str] = &[
    "contract", "function", "constructor", "modifier", "event", "emit", "returns", "return", "if",
    "else", "while", "break", "continue", "require", "assert", "transfer", "true", "false",
    "public", "external", "internal", "private", "pure", "view", "payable", "constant", "mapping",
    "uint", "bool", "address", "string", "msg", "tx", "block", "_",
];

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::Hex(v) => format!("`{v:#x}`"),
        Tok::Str(_) => "string literal".into(),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of file".into(),
    }
}

impl Parser {
    fn id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        Diagnostic::error(
            Code::E0002,
            self.span(),
            format!("expected {expected}, found {}", describe(self.peek())),
        )
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Span> {
        if self.is_punct(p) {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<Span> {
        if self.is_word(w) {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) if !RESERVED.contains(&name.as_str()) => {
                let span = self.advance().span;
                Ok(Ident::new(name, span))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn elementary_type(&mut self) -> PResult<ElementaryType> {
        if let Tok::Ident(name) = self.peek() {
            if let Some(t) = elementary_keyword(name) {
                self.advance();
                return Ok(t);
            }
        }
        Err(self.unexpected("type"))
    }

    fn unit(&mut self, file: &str) -> PResult<SourceUnit> {
        let start = self.span();
        let mut contracts = Vec::new();
        while !matches!(self.peek(), Tok::Eof) {
            contracts.push(self.contract()?);
        }
        let end = self.span();
        Ok(SourceUnit { file: file.to_string(), contracts, span: start.to(end) })
    }

    fn contract(&mut self) -> PResult<ContractDecl> {
        let start = self.expect_word("contract")?;
        let id = self.id();
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut c = ContractDecl {
            id,
            name,
            state_vars: Vec::new(),
            events: Vec::new(),
            modifiers: Vec::new(),
            functions: Vec::new(),
            span: start,
        };
        while !self.is_punct("}") {
            match self.peek() {
                Tok::Ident(w) if w == "event" => {
                    let e = self.event()?;
                    c.events.push(e);
                }
                Tok::Ident(w) if w == "modifier" => {
                    let m = self.modifier()?;
                    c.modifiers.push(m);
                }
                Tok::Ident(w) if w == "function" || w == "constructor" => {
                    let f = self.function()?;
                    c.functions.push(f);
                }
                Tok::Ident(w) if w == "mapping" || elementary_keyword(w).is_some() => {
                    let v = self.state_var()?;
                    c.state_vars.push(v);
                }
                _ => return Err(self.unexpected("contract member")),
            }
        }
        let end = self.expect_punct("}")?;
        c.span = start.to(end);
        Ok(c)
    }

    fn state_var(&mut self) -> PResult<StateVarDecl> {
        let start = self.span();
        let id = self.id();
        let ty = if self.eat_word("mapping") {
            self.expect_punct("(")?;
            self.expect_word("address")?;
            self.expect_punct("=>")?;
            let value_span = self.span();
            let v = self.elementary_type()?;
            if !matches!(v, ElementaryType::Uint | ElementaryType::Bool) {
                return Err(Diagnostic::error(
                    Code::E0002,
                    value_span,
                    "mapping values must be `uint` or `bool`",
                ));
            }
            self.expect_punct(")")?;
            TypeName::Mapping(v)
        } else {
            TypeName::Elementary(self.elementary_type()?)
        };
        let constant = self.eat_word("constant");
        let name = self.ident()?;
        let init = if self.eat_punct("=") { Some(self.expr()?) } else { None };
        let end = self.expect_punct(";")?;
        Ok(StateVarDecl { id, ty, constant, name, init, span: start.to(end) })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.is_punct(")") {
            loop {
                let start = self.span();
                let id = self.id();
                let ty = self.elementary_type()?;
                let name = self.ident()?;
                params.push(Param { id, ty, span: start.to(name.span), name });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    fn event(&mut self) -> PResult<EventDecl> {
        let start = self.expect_word("event")?;
        let id = self.id();
        let name = self.ident()?;
        let params = self.params()?;
        let end = self.expect_punct(";")?;
        Ok(EventDecl { id, name, params, span: start.to(end) })
    }

    fn modifier(&mut self) -> PResult<ModifierDecl> {
        let start = self.expect_word("modifier")?;
        let id = self.id();
        let name = self.ident()?;
        let params = if self.is_punct("(") { self.params()? } else { Vec::new() };
        let body = self.block()?;
        Ok(ModifierDecl { id, name, params, span: start.to(body.span), body })
    }

    fn function(&mut self) -> PResult<FunctionDecl> {
        let start = self.span();
        let id = self.id();
        let is_constructor = self.eat_word("constructor");
        let name = if is_constructor {
            Ident::new("constructor", start)
        } else {
            self.expect_word("function")?;
            self.ident()?
        };
        let params = self.params()?;
        let mut visibility = None;
        let mut mutability = None;
        let mut modifiers = Vec::new();
        let mut returns = None;
        loop {
            let span = self.span();
            let word = match self.peek() {
                Tok::Ident(w) => w.clone(),
                _ => break,
            };
            if let Some(v) = visibility_keyword(&word) {
                if is_constructor {
                    return Err(Diagnostic::error(
                        Code::E0002,
                        span,
                        "constructors do not take a visibility",
                    ));
                }
                if visibility.replace(v).is_some() {
                    return Err(Diagnostic::error(Code::E0002, span, "visibility given twice"));
                }
                self.advance();
            } else if let Some(m) = mutability_keyword(&word) {
                if mutability.replace(m).is_some() {
                    return Err(Diagnostic::error(Code::E0002, span, "mutability given twice"));
                }
                self.advance();
            } else if word == "returns" {
                if is_constructor {
                    return Err(Diagnostic::error(
                        Code::E0002,
                        span,
                        "constructors cannot return a value",
                    ));
                }
                self.advance();
                self.expect_punct("(")?;
                returns = Some(self.elementary_type()?);
                self.expect_punct(")")?;
                break;
            } else {
                let id = self.id();
                let name = self.ident()?;
                let mut args = Vec::new();
                let mut end = name.span;
                if self.eat_punct("(") {
                    args = self.args_until_close()?;
                    end = self.prev_span();
                }
                modifiers.push(ModifierInvocation { id, span: name.span.to(end), name, args });
            }
        }
        let header_end = self.prev_span();
        let visibility = match visibility {
            Some(v) => v,
            None if is_constructor => Visibility::Public,
            None => return Err(self.unexpected("visibility (`public`, `external`, `internal` or `private`)")),
        };
        let body = self.block()?;
        Ok(FunctionDecl {
            id,
            name,
            params,
            returns,
            visibility,
            mutability: mutability.unwrap_or(Mutability::Nonpayable),
            modifiers,
            is_constructor,
            header_span: start.to(header_end),
            span: start.to(body.span),
            body,
        })
    }

    /// Comma-separated expressions after an already consumed `(`.
    fn args_until_close(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if !self.is_punct(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect_punct("{")?;
        let id = self.id();
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        let end = self.expect_punct("}")?;
        Ok(Block { id, stmts, span: start.to(end) })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.span();
        let id = self.id();
        let word = match self.peek() {
            Tok::Ident(w) => Some(w.clone()),
            _ => None,
        };
        let kind = match word.as_deref() {
            Some(w) if elementary_keyword(w).is_some() => {
                let ty = self.elementary_type()?;
                let name = self.ident()?;
                let init = if self.eat_punct("=") { Some(self.expr()?) } else { None };
                StmtKind::VarDecl { ty, name, init }
            }
            Some("if") => {
                self.advance();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let then_block = self.block()?;
                let else_block = if self.eat_word("else") {
                    if self.is_word("if") {
                        // `else if` is sugar for an else block holding one if statement.
                        let inner = self.stmt()?;
                        let span = inner.span;
                        Some(Block { id: self.id(), stmts: vec![inner], span })
                    } else {
                        Some(self.block()?)
                    }
                } else {
                    None
                };
                let end = else_block.as_ref().map_or(then_block.span, |b| b.span);
                return Ok(Stmt {
                    id,
                    kind: StmtKind::If { cond, then_block, else_block },
                    span: start.to(end),
                });
            }
            Some("while") => {
                self.advance();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let body = self.block()?;
                let span = start.to(body.span);
                return Ok(Stmt { id, kind: StmtKind::While { cond, body }, span });
            }
            Some("return") => {
                self.advance();
                let value = if self.is_punct(";") { None } else { Some(self.expr()?) };
                StmtKind::Return(value)
            }
            Some("break") => {
                self.advance();
                StmtKind::Break
            }
            Some("continue") => {
                self.advance();
                StmtKind::Continue
            }
            Some("_") => {
                self.advance();
                StmtKind::Placeholder
            }
            Some("emit") => {
                self.advance();
                let event = self.ident()?;
                self.expect_punct("(")?;
                let args = self.args_until_close()?;
                StmtKind::Emit { event, args }
            }
            Some("require") => {
                self.advance();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                let message = if self.eat_punct(",") { Some(self.expr()?) } else { None };
                self.expect_punct(")")?;
                StmtKind::Require { cond, message }
            }
            Some("assert") => {
                self.advance();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                StmtKind::Assert(cond)
            }
            Some("transfer") => {
                self.advance();
                self.expect_punct("(")?;
                let to = self.expr()?;
                self.expect_punct(",")?;
                let amount = self.expr()?;
                self.expect_punct(")")?;
                StmtKind::Transfer { to, amount }
            }
            _ => {
                let target = self.expr()?;
                let op = match self.peek() {
                    Tok::Punct("=") => Some(AssignOp::Assign),
                    Tok::Punct("+=") => Some(AssignOp::AddAssign),
                    Tok::Punct("-=") => Some(AssignOp::SubAssign),
                    Tok::Punct("*=") => Some(AssignOp::MulAssign),
                    Tok::Punct("/=") => Some(AssignOp::DivAssign),
                    _ => None,
                };
                match op {
                    Some(op) => {
                        self.advance();
                        let value = self.expr()?;
                        StmtKind::Assign { target, op, value }
                    }
                    None => StmtKind::Expr(target),
                }
            }
        };
        let end = self.expect_punct(";")?;
        Ok(Stmt { id, kind, span: start.to(end) })
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        let Tok::Punct(p) = self.peek() else { return None };
        Some(match *p {
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "%" => BinaryOp::Mod,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "&&" => BinaryOp::And,
            "||" => BinaryOp::Or,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.advance();
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(
                self.id(),
                ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span,
            );
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.span();
        let op = if self.is_punct("-") {
            Some(UnaryOp::Neg)
        } else if self.is_punct("!") {
            Some(UnaryOp::Not)
        } else {
            None
        };
        if let Some(op) = op {
            self.advance();
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(Expr::new(self.id(), ExprKind::Unary { op, operand: Box::new(operand) }, span));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.is_punct("[") {
                self.advance();
                let key = self.expr()?;
                let end = self.expect_punct("]")?;
                let span = e.span.to(end);
                e = Expr::new(self.id(), ExprKind::Index { base: Box::new(e), key: Box::new(key) }, span);
            } else if self.is_punct("++") || self.is_punct("--") {
                let op = if self.is_punct("++") { UnaryOp::PostInc } else { UnaryOp::PostDec };
                let end = self.advance().span;
                let span = e.span.to(end);
                e = Expr::new(self.id(), ExprKind::Unary { op, operand: Box::new(e) }, span);
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                Ok(Expr::new(self.id(), ExprKind::Int(v), start))
            }
            Tok::Hex(v) => {
                self.advance();
                Ok(Expr::new(self.id(), ExprKind::Address(v), start))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Expr::new(self.id(), ExprKind::Str(s), start))
            }
            Tok::Punct("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Ident(w) => match w.as_str() {
                "true" | "false" => {
                    self.advance();
                    Ok(Expr::new(self.id(), ExprKind::Bool(w == "true"), start))
                }
                "msg" | "tx" | "block" => {
                    self.advance();
                    self.expect_punct(".")?;
                    let member_span = self.span();
                    let member = match self.peek() {
                        Tok::Ident(m) => m.clone(),
                        _ => return Err(self.unexpected("member name")),
                    };
                    let builtin = match (w.as_str(), member.as_str()) {
                        ("msg", "sender") => Builtin::MsgSender,
                        ("msg", "value") => Builtin::MsgValue,
                        ("tx", "origin") => Builtin::TxOrigin,
                        ("block", "timestamp") => Builtin::BlockTimestamp,
                        _ => {
                            return Err(Diagnostic::error(
                                Code::E0002,
                                member_span,
                                format!("unknown member `{w}.{member}`"),
                            ))
                        }
                    };
                    let end = self.advance().span;
                    Ok(Expr::new(self.id(), ExprKind::Builtin(builtin), start.to(end)))
                }
                _ => {
                    let name = self.ident()?;
                    if self.is_punct("(") {
                        self.advance();
                        let args = self.args_until_close()?;
                        let span = start.to(self.prev_span());
                        Ok(Expr::new(self.id(), ExprKind::Call { callee: name, args }, span))
                    } else {
                        Ok(Expr::new(self.id(), ExprKind::Ident(name.name), name.span))
                    }
                }
            },
            _ => Err(self.unexpected("expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_contract() {
        let unit = parse("c.msol", "contract C { uint x; }").unwrap();
        assert_eq!(unit.contracts.len(), 1);
        let c = &unit.contracts[0];
        assert_eq!(c.state_vars.len(), 1);
        assert!(c.functions.is_empty());
    }

    #[test]
    fn empty_rhs_is_reported_at_semicolon() {
        let src = "contract C { function f() public { x = ; } }";
        let diags = parse("c.msol", src).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].is_error());
        assert_eq!(diags[0].code, Code::E0002);
        assert_eq!(&src[diags[0].span.start as usize..diags[0].span.end as usize], ";");
    }

    #[test]
    fn precedence_and_associativity() {
        let unit =
            parse("c.msol", "contract C { function f() public pure { uint a = 1 - 2 - 3 * 4; } }")
                .unwrap();
        let StmtKind::VarDecl { init: Some(e), .. } = &unit.contracts[0].functions[0].body.stmts[0].kind
        else {
            panic!()
        };
        let ExprKind::Binary { op: BinaryOp::Sub, lhs, rhs } = &e.kind else { panic!() };
        assert!(matches!(lhs.kind, ExprKind::Binary { op: BinaryOp::Sub, .. }));
        assert!(matches!(rhs.kind, ExprKind::Binary { op: BinaryOp::Mul, .. }));
    }

    #[test]
    fn header_qualifiers_any_order() {
        let src = "contract C { modifier m { _; } function f(uint a) m payable public returns (uint) { return a; } }";
        let f = &parse("c.msol", src).unwrap().contracts[0].functions[0];
        assert_eq!(f.visibility, Visibility::Public);
        assert_eq!(f.mutability, Mutability::Payable);
        assert_eq!(f.modifiers.len(), 1);
        assert_eq!(f.returns, Some(ElementaryType::Uint));
    }

    #[test]
    fn rejects_missing_visibility_and_reserved_names() {
        assert!(parse("c.msol", "contract C { function f() { } }").is_err());
        assert!(parse("c.msol", "contract C { uint if; }").is_err());
        assert!(parse("c.msol", "contract C { constructor() public { } }").is_err());
        assert!(parse("c.msol", "contract C { mapping(address => string) m; }").is_err());
    }
}
