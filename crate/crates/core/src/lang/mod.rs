//! MiniSol front end: parsing, checking, printing and diffing.

pub mod ast;
pub mod check;
pub mod diagnostic;
pub mod diff;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod visit;

pub use ast::*;
pub use check::{check, CheckedUnit, SemanticInfo, VarInfo, VarKind, VarScope, VarType};
pub use diagnostic::{Code, Diagnostic, Severity};
pub use diff::{diff, diff_regions, DiffError, LineDiff};
pub use parser::parse;
pub use printer::print;

/// Parse and check in one step.
pub fn load(file: &str, text: &str) -> Result<CheckedUnit, Vec<Diagnostic>> {
    check(&parse(file, text)?)
}
