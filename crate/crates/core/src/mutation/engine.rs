use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::apply::apply;
use super::candidate::{collect_candidates, MutationCandidate, Replacement};
use super::operator::Operator;
use crate::compiler::{compile, Bytecode, CompileError, Fingerprint};
use crate::lang::{check, diff_regions, CheckedUnit, Diagnostic, LineDiff, SourceUnit, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub target: usize,
    pub cap: usize,
    pub seed: u64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig { target: 50, cap: 1000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("target must be at least 1")]
    ZeroTarget,
    #[error("attempt cap {cap} is below the target {target}")]
    CapBelowTarget { target: usize, cap: usize },
    #[error(transparent)]
    Compile(#[from] CompileError),
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<(), GenerateError> {
        if self.target == 0 {
            return Err(GenerateError::ZeroTarget);
        }
        if self.cap < self.target {
            return Err(GenerateError::CapBelowTarget { target: self.target, cap: self.cap });
        }
        Ok(())
    }
}

/// One mutation attempt before classification.
#[derive(Debug, Clone)]
pub struct Attempt {
    pub operator: Operator,
    /// Index into the candidate list.
    pub candidate: usize,
    pub replacement: Replacement,
    pub span: Span,
    pub unit: SourceUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Stillborn,
    Duplicate,
    Viable,
}

#[derive(Debug, Clone)]
pub struct Mutant {
    pub id: usize,
    pub operator: Operator,
    pub file: String,
    pub span: Span,
    pub original: String,
    pub mutated: String,
    pub unit: SourceUnit,
    pub classification: Classification,
    /// Present iff the mutant compiled.
    pub fingerprint: Option<Fingerprint>,
    /// Present for viable mutants.
    pub bytecode: Option<Arc<Bytecode>>,
    /// Check errors of a stillborn mutant.
    pub diagnostics: Vec<Diagnostic>,
}

impl Mutant {
    pub fn line(&self) -> u32 {
        self.span.line
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "id": self.id,
            "operator": self.operator.code(),
            "swc_tags": self.operator.swc_tags(),
            "file": self.file,
            "line": self.span.line,
            "original": self.original,
            "mutated": self.mutated,
            "classification": self.classification,
        })
    }

    /// Differing printed lines against the original unit.
    pub fn diff(&self, original: &SourceUnit) -> Vec<LineDiff> {
        diff_regions(original, &self.unit)
    }

    /// Two-line diff text, one block per differing line.
    pub fn diff_text(&self, original: &SourceUnit) -> String {
        self.diff(original).iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub attempts: usize,
    pub stillborn: usize,
    pub duplicate: usize,
    pub viable: usize,
    pub exhausted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no mutation possible: every candidate has an empty replacement pool")]
pub struct NoMutation;

/// Draw one candidate uniformly, then an operator and a replacement
/// uniformly from its non-empty pools. Candidates with nothing to offer are
/// dropped and the draw is repeated.
pub fn mutate_once<R: Rng + ?Sized>(
    unit: &CheckedUnit,
    candidates: &[MutationCandidate],
    rng: &mut R,
) -> Result<Attempt, NoMutation> {
    let mut alive: Vec<usize> = (0..candidates.len()).collect();
    while !alive.is_empty() {
        let pick = rng.gen_range(0..alive.len());
        let index = alive[pick];
        let cand = &candidates[index];
        let ops = cand.effective_operators();
        if ops.is_empty() {
            alive.remove(pick);
            continue;
        }
        let op = ops[rng.gen_range(0..ops.len())];
        let pool = cand.pool(op);
        let replacement = pool[rng.gen_range(0..pool.len())].clone();
        let mutated = apply(&unit.unit, &replacement.edit);
        return Ok(Attempt { operator: op, candidate: index, replacement, span: cand.span, unit: mutated });
    }
    Err(NoMutation)
}

/// Check, compile and fingerprint an attempt. Viable fingerprints are added to `seen`.
pub fn classify(attempt: Attempt, id: usize, original_fp: &Fingerprint, seen: &mut HashSet<Fingerprint>) -> Mutant {
    let mut m = Mutant {
        id,
        operator: attempt.operator,
        file: attempt.unit.file.clone(),
        span: attempt.span,
        original: attempt.replacement.original,
        mutated: attempt.replacement.mutated,
        unit: attempt.unit,
        classification: Classification::Stillborn,
        fingerprint: None,
        bytecode: None,
        diagnostics: Vec::new(),
    };
    let checked = match check(&m.unit) {
        Ok(c) => c,
        Err(diags) => {
            m.diagnostics = diags;
            return m;
        }
    };
    let Ok(code) = compile(&checked) else {
        return m;
    };
    let fp = code.fingerprint();
    m.fingerprint = Some(fp);
    if fp == *original_fp || seen.contains(&fp) {
        m.classification = Classification::Duplicate;
    } else {
        seen.insert(fp);
        m.classification = Classification::Viable;
        m.bytecode = Some(Arc::new(code));
    }
    m
}

/// Attempt mutations until `target` are viable or `cap` attempts were made.
pub fn generate(unit: &CheckedUnit, cfg: &GenerationConfig) -> Result<(Vec<Mutant>, GenerationStats), GenerateError> {
    cfg.validate()?;
    let original = compile(unit)?.fingerprint();
    let candidates = collect_candidates(unit);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut seen = HashSet::new();
    let mut mutants = Vec::new();
    let mut stats = GenerationStats::default();
    while stats.viable < cfg.target && stats.attempts < cfg.cap {
        let Ok(attempt) = mutate_once(unit, &candidates, &mut rng) else { break };
        let m = classify(attempt, stats.attempts, &original, &mut seen);
        stats.attempts += 1;
        match m.classification {
            Classification::Stillborn => stats.stillborn += 1,
            Classification::Duplicate => stats.duplicate += 1,
            Classification::Viable => stats.viable += 1,
        }
        mutants.push(m);
    }
    stats.exhausted = stats.viable < cfg.target;
    Ok((mutants, stats))
}

/// Every single-site mutation the candidate list allows, in candidate,
/// operator, pool order.
pub fn enumerate_all(unit: &CheckedUnit) -> Vec<Attempt> {
    let mut out = Vec::new();
    for (index, cand) in collect_candidates(unit).iter().enumerate() {
        for (op, pool) in &cand.pools {
            for r in pool {
                out.push(Attempt {
                    operator: *op,
                    candidate: index,
                    replacement: r.clone(),
                    span: cand.span,
                    unit: apply(&unit.unit, &r.edit),
                });
            }
        }
    }
    out
}

/// Classify a whole attempt list in order.
pub fn classify_all(unit: &CheckedUnit, attempts: Vec<Attempt>) -> Result<Vec<Mutant>, CompileError> {
    let original = compile(unit)?.fingerprint();
    let mut seen = HashSet::new();
    Ok(attempts.into_iter().enumerate().map(|(i, a)| classify(a, i, &original, &mut seen)).collect())
}

/// JSON array of mutant records.
pub fn mutants_to_json(mutants: &[Mutant]) -> serde_json::Value {
    serde_json::Value::Array(mutants.iter().map(Mutant::to_json).collect())
}
