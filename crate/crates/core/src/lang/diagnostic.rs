use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Stable diagnostic codes. Each semantic error class has its own code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Code {
    /// Unrecognised character or malformed literal.
    E0001,
    /// Unexpected token.
    E0002,
    /// Unknown identifier, function, event or modifier.
    E0101,
    /// Type mismatch.
    E0102,
    /// Pure/view/payable rule violated.
    E0103,
    /// Duplicate declaration.
    E0104,
    /// Wrong number of arguments.
    E0105,
    /// Assignment to something that is not assignable.
    E0106,
    /// `break`/`continue` outside a loop, `_` outside a modifier, bad `return`.
    E0107,
    /// Call that violates visibility rules.
    E0108,
    /// Source unit does not declare exactly one contract.
    E0109,
    /// Modifier body must contain exactly one `_;`.
    E0110,
    /// Statement has no effect.
    W0001,
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), span }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), span }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn to_record(&self, file: &str) -> DiagnosticRecord {
        DiagnosticRecord {
            severity: self.severity,
            code: self.code.to_string(),
            message: self.message.clone(),
            file: file.to_string(),
            line: self.span.line,
            col: self.span.col,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}[{}]: {}", self.span.line, self.span.col, self.code, self.message)
    }
}

/// Serialized form of a diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub file: String,
    pub line: u32,
    pub col: u32,
}

pub fn diagnostics_to_json(file: &str, diags: &[Diagnostic]) -> String {
    let records: Vec<_> = diags.iter().map(|d| d.to_record(file)).collect();
    serde_json::to_string_pretty(&records).expect("diagnostic records serialize")
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
