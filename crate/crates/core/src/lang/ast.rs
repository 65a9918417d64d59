//! Syntax tree for MiniSol.
//!
//! Every node carries a [`Span`] into the text it was parsed from and a
//! [`NodeId`] that is unique within its [`SourceUnit`]. Neither takes part in
//! structural comparison: use [`SourceUnit::structurally_eq`].

use std::fmt;

use serde::{Deserialize, Serialize};

/// Byte range plus 1-based line/column of the first byte.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: u32,
    pub end: u32,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(start: u32, end: u32, line: u32, col: u32) -> Self {
        Span { start, end, line, col }
    }

    /// Smallest span covering both `self` and `other`, positioned at the earlier one.
    pub fn to(self, other: Span) -> Span {
        let (first, _) = if self.start <= other.start { (self, other) } else { (other, self) };
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
            line: first.line,
            col: first.col,
        }
    }

    pub fn contains(&self, inner: &Span) -> bool {
        self.start <= inner.start && inner.end <= self.end
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident { name: name.into(), span }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementaryType {
    Uint,
    Bool,
    Address,
    String,
}

impl ElementaryType {
    pub fn keyword(self) -> &'static str {
        match self {
            ElementaryType::Uint => "uint",
            ElementaryType::Bool => "bool",
            ElementaryType::Address => "address",
            ElementaryType::String => "string",
        }
    }
}

/// Written type. Mappings only appear on state variables and are keyed by address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeName {
    Elementary(ElementaryType),
    /// `mapping(address => V)` with `V` either `uint` or `bool`.
    Mapping(ElementaryType),
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeName::Elementary(t) => f.write_str(t.keyword()),
            TypeName::Mapping(v) => write!(f, "mapping(address => {})", v.keyword()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    External,
    Internal,
    Private,
}

impl Visibility {
    pub const ALL: [Visibility; 4] =
        [Visibility::Public, Visibility::External, Visibility::Internal, Visibility::Private];

    pub fn keyword(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::External => "external",
            Visibility::Internal => "internal",
            Visibility::Private => "private",
        }
    }

    /// Reachable by a transaction or an off-chain call.
    pub fn is_dispatchable(self) -> bool {
        matches!(self, Visibility::Public | Visibility::External)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mutability {
    Pure,
    View,
    Payable,
    /// Default; never written in source.
    Nonpayable,
}

impl Mutability {
    pub const ALL: [Mutability; 4] =
        [Mutability::Pure, Mutability::View, Mutability::Payable, Mutability::Nonpayable];

    pub fn keyword(self) -> &'static str {
        match self {
            Mutability::Pure => "pure",
            Mutability::View => "view",
            Mutability::Payable => "payable",
            Mutability::Nonpayable => "nonpayable",
        }
    }

    pub fn is_read_only(self) -> bool {
        matches!(self, Mutability::Pure | Mutability::View)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub file: String,
    pub contracts: Vec<ContractDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDecl {
    pub id: NodeId,
    pub name: Ident,
    pub state_vars: Vec<StateVarDecl>,
    pub events: Vec<EventDecl>,
    pub modifiers: Vec<ModifierDecl>,
    pub functions: Vec<FunctionDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVarDecl {
    pub id: NodeId,
    pub ty: TypeName,
    pub constant: bool,
    pub name: Ident,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub id: NodeId,
    pub ty: ElementaryType,
    pub name: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDecl {
    pub id: NodeId,
    pub name: Ident,
    pub params: Vec<Param>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierDecl {
    pub id: NodeId,
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierInvocation {
    pub id: NodeId,
    pub name: Ident,
    pub args: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub id: NodeId,
    pub name: Ident,
    pub params: Vec<Param>,
    pub returns: Option<ElementaryType>,
    /// Constructors carry `Public` here; it is never printed.
    pub visibility: Visibility,
    pub mutability: Mutability,
    pub modifiers: Vec<ModifierInvocation>,
    pub body: Block,
    pub is_constructor: bool,
    /// Header only: from `function`/`constructor` up to the opening brace.
    pub header_span: Span,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub id: NodeId,
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub id: NodeId,
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AssignOp {
    Assign,
    AddAssign,
    SubAssign,
    MulAssign,
    DivAssign,
}

impl AssignOp {
    pub const ALL: [AssignOp; 5] = [
        AssignOp::Assign,
        AssignOp::AddAssign,
        AssignOp::SubAssign,
        AssignOp::MulAssign,
        AssignOp::DivAssign,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::AddAssign => "+=",
            AssignOp::SubAssign => "-=",
            AssignOp::MulAssign => "*=",
            AssignOp::DivAssign => "/=",
        }
    }

    /// Arithmetic operator folded into a compound assignment.
    pub fn binary(self) -> Option<BinaryOp> {
        match self {
            AssignOp::Assign => None,
            AssignOp::AddAssign => Some(BinaryOp::Add),
            AssignOp::SubAssign => Some(BinaryOp::Sub),
            AssignOp::MulAssign => Some(BinaryOp::Mul),
            AssignOp::DivAssign => Some(BinaryOp::Div),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    VarDecl { ty: ElementaryType, name: Ident, init: Option<Expr> },
    Assign { target: Expr, op: AssignOp, value: Expr },
    If { cond: Expr, then_block: Block, else_block: Option<Block> },
    While { cond: Expr, body: Block },
    Return(Option<Expr>),
    Break,
    Continue,
    Expr(Expr),
    Emit { event: Ident, args: Vec<Expr> },
    Require { cond: Expr, message: Option<Expr> },
    Assert(Expr),
    Transfer { to: Expr, amount: Expr },
    /// `_;` inside a modifier body.
    Placeholder,
}

impl StmtKind {
    pub fn is_compound(&self) -> bool {
        matches!(self, StmtKind::If { .. } | StmtKind::While { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpCategory {
    Arithmetic,
    Relational,
    Logical,
}

impl BinaryOp {
    pub const ARITHMETIC: [BinaryOp; 5] =
        [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod];
    pub const RELATIONAL: [BinaryOp; 6] =
        [BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne];
    pub const LOGICAL: [BinaryOp; 2] = [BinaryOp::And, BinaryOp::Or];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Mod => "%",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    pub fn category(self) -> OpCategory {
        match self {
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod => {
                OpCategory::Arithmetic
            }
            BinaryOp::And | BinaryOp::Or => OpCategory::Logical,
            _ => OpCategory::Relational,
        }
    }

    pub fn category_members(self) -> &'static [BinaryOp] {
        match self.category() {
            OpCategory::Arithmetic => &Self::ARITHMETIC,
            OpCategory::Relational => &Self::RELATIONAL,
            OpCategory::Logical => &Self::LOGICAL,
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnaryOp {
    Neg,
    Not,
    PostInc,
    PostDec,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Not => "!",
            UnaryOp::PostInc => "++",
            UnaryOp::PostDec => "--",
        }
    }

    pub fn is_postfix(self) -> bool {
        matches!(self, UnaryOp::PostInc | UnaryOp::PostDec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Builtin {
    MsgSender,
    MsgValue,
    TxOrigin,
    BlockTimestamp,
}

impl Builtin {
    pub fn text(self) -> &'static str {
        match self {
            Builtin::MsgSender => "msg.sender",
            Builtin::MsgValue => "msg.value",
            Builtin::TxOrigin => "tx.origin",
            Builtin::BlockTimestamp => "block.timestamp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(u64),
    Bool(bool),
    Str(String),
    /// Hex literal `0x...`; addresses are small integers in this VM.
    Address(u64),
    Ident(String),
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnaryOp, operand: Box<Expr> },
    Builtin(Builtin),
    Index { base: Box<Expr>, key: Box<Expr> },
    Call { callee: Ident, args: Vec<Expr> },
}

impl Expr {
    pub fn new(id: NodeId, kind: ExprKind, span: Span) -> Self {
        Expr { id, kind, span }
    }

    /// Direct subexpressions in source order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            ExprKind::Unary { operand, .. } => vec![operand],
            ExprKind::Index { base, key } => vec![base, key],
            ExprKind::Call { args, .. } => args.iter().collect(),
            _ => Vec::new(),
        }
    }
}

pub fn format_address(value: u64) -> String {
    format!("0x{value:040x}")
}

impl SourceUnit {
    /// Equality ignoring spans and node ids.
    pub fn structurally_eq(&self, other: &SourceUnit) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        super::visit::erase_positions(&mut a);
        super::visit::erase_positions(&mut b);
        a.contracts == b.contracts
    }

    pub fn contract(&self) -> Option<&ContractDecl> {
        self.contracts.first()
    }
}

impl ContractDecl {
    pub fn constructor(&self) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.is_constructor)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| !f.is_constructor && f.name.name == name)
    }

    pub fn modifier(&self, name: &str) -> Option<&ModifierDecl> {
        self.modifiers.iter().find(|m| m.name.name == name)
    }

    pub fn event(&self, name: &str) -> Option<&EventDecl> {
        self.events.iter().find(|e| e.name.name == name)
    }

    pub fn state_var(&self, name: &str) -> Option<&StateVarDecl> {
        self.state_vars.iter().find(|v| v.name.name == name)
    }
}
