//! Two-line diffs between an original unit and a single-site mutant,
//! computed on the canonical printed form.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{SourceUnit, Span};
use super::printer::print;

/// One differing region: at most one original and one mutated line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineDiff {
    /// 1-based line in the printed original.
    pub line: u32,
    /// Original line with indentation stripped; empty when the mutant inserted a line.
    pub original: String,
    /// Mutated line with indentation stripped; empty when the mutant deleted the line.
    pub mutated: String,
    /// Byte range of the original line's text in the printed original.
    pub span: Span,
}

impl fmt::Display for LineDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |prefix: char, text: &str| {
            if text.is_empty() {
                prefix.to_string()
            } else {
                format!("{prefix} {text}")
            }
        };
        write!(f, "{}\n{}", side('<', &self.original), side('>', &self.mutated))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("units are identical")]
    Identical,
    #[error("units differ in more than one region")]
    MultipleRegions,
}

/// Diff of a mutant that changes exactly one printed line (or inserts or
/// deletes one).
pub fn diff(original: &SourceUnit, mutant: &SourceUnit) -> Result<LineDiff, DiffError> {
    let a = print(original);
    let b = print(mutant);
    let hunks = hunks(&a, &b);
    match hunks.as_slice() {
        [] => Err(DiffError::Identical),
        [h] if h.orig.len() <= 1 && h.mutated.len() <= 1 => Ok(h.to_line_diff(&a)),
        _ => Err(DiffError::MultipleRegions),
    }
}

/// All differing regions, in order. Used for mutants that touch two sites by
/// definition (declaration swaps).
pub fn diff_regions(original: &SourceUnit, mutant: &SourceUnit) -> Vec<LineDiff> {
    let a = print(original);
    let b = print(mutant);
    let mut out = Vec::new();
    for h in hunks(&a, &b) {
        let n = h.orig.len().max(h.mutated.len());
        for i in 0..n {
            let single = Hunk {
                start: h.start + i,
                orig: h.orig.get(i).map(|s| vec![*s]).unwrap_or_default(),
                mutated: h.mutated.get(i).map(|s| vec![*s]).unwrap_or_default(),
            };
            out.push(single.to_line_diff(&a));
        }
    }
    out
}

struct Hunk<'a> {
    /// 0-based index of the first differing line in the original.
    start: usize,
    orig: Vec<&'a str>,
    mutated: Vec<&'a str>,
}

impl Hunk<'_> {
    fn to_line_diff(&self, original_text: &str) -> LineDiff {
        let line = self.start as u32 + 1;
        let mut offset = 0usize;
        for l in original_text.split_inclusive('\n').take(self.start) {
            offset += l.len();
        }
        let span = match self.orig.first() {
            Some(text) => {
                let indent = text.len() - text.trim_start().len();
                let start = offset + indent;
                Span::new(start as u32, (offset + text.len()) as u32, line, indent as u32 + 1)
            }
            None => Span::new(offset as u32, offset as u32, line, 1),
        };
        LineDiff {
            line,
            original: self.orig.first().map(|s| s.trim().to_string()).unwrap_or_default(),
            mutated: self.mutated.first().map(|s| s.trim().to_string()).unwrap_or_default(),
            span,
        }
    }
}

fn hunks<'a>(a: &'a str, b: &'a str) -> Vec<Hunk<'a>> {
    let la: Vec<&str> = a.lines().collect();
    let lb: Vec<&str> = b.lines().collect();
    if la.len() == lb.len() {
        // Same shape: group consecutive differing lines.
        let mut out: Vec<Hunk> = Vec::new();
        for (i, (x, y)) in la.iter().zip(&lb).enumerate() {
            if x == y {
                continue;
            }
            match out.last_mut() {
                Some(h) if h.start + h.orig.len() == i => {
                    h.orig.push(x);
                    h.mutated.push(y);
                }
                _ => out.push(Hunk { start: i, orig: vec![x], mutated: vec![y] }),
            }
        }
        return out;
    }
    let prefix = la.iter().zip(&lb).take_while(|(x, y)| x == y).count();
    let max_suffix = la.len().min(lb.len()) - prefix;
    let suffix = la
        .iter()
        .rev()
        .zip(lb.iter().rev())
        .take(max_suffix)
        .take_while(|(x, y)| x == y)
        .count();
    vec![Hunk {
        start: prefix,
        orig: la[prefix..la.len() - suffix].to_vec(),
        mutated: lb[prefix..lb.len() - suffix].to_vec(),
    }]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn unit(src: &str) -> SourceUnit {
        parse("t.msol", src).unwrap()
    }

    #[test]
    fn single_line_change() {
        let a = unit("contract C { function f(uint x) public pure returns (bool) { if(x >= 900) { return true; } return false; } }");
        let b = unit("contract C { function f(uint x) public pure returns (bool) { if(x >= 1) { return true; } return false; } }");
        let d = diff(&a, &b).unwrap();
        assert_eq!(d.original, "if(x >= 900) {");
        assert_eq!(d.mutated, "if(x >= 1) {");
        assert_eq!(d.to_string(), "< if(x >= 900) {\n> if(x >= 1) {");
        let printed = print(&a);
        assert_eq!(&printed[d.span.start as usize..d.span.end as usize], "if(x >= 900) {");
    }

    #[test]
    fn deletion_has_empty_mutated_side() {
        let a = unit("contract C { event E(); function f() public { emit E(); emit E(); } }");
        let b = unit("contract C { event E(); function f() public { emit E(); } }");
        let d = diff(&a, &b).unwrap();
        assert_eq!(d.original, "emit E();");
        assert_eq!(d.mutated, "");
        assert_eq!(d.to_string(), "< emit E();\n>");
    }

    #[test]
    fn identical_and_multi_region_errors() {
        let a = unit("contract C { uint x = 1; uint y = 2; }");
        assert_eq!(diff(&a, &a), Err(DiffError::Identical));
        let b = unit("contract C { uint x = 2; uint y = 1; }");
        assert_eq!(diff(&a, &b), Err(DiffError::MultipleRegions));
        assert_eq!(diff_regions(&a, &b).len(), 2);
    }
}
