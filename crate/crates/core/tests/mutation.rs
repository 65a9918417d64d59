use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use mutforge::lang::{load, CheckedUnit};
use mutforge::mutation::*;

fn luckdraw() -> CheckedUnit {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/Luckdraw.msol");
    load("Luckdraw.msol", &fs::read_to_string(p).unwrap()).unwrap()
}

fn pool_texts(cands: &[MutationCandidate], op: Operator, original: &str) -> Vec<Vec<String>> {
    cands
        .iter()
        .flat_map(|c| c.pools.iter())
        .filter(|(o, pool)| *o == op && pool.first().is_some_and(|r| r.original == original))
        .map(|(_, pool)| pool.iter().map(|r| r.mutated.clone()).collect())
        .collect()
}

#[test]
fn literal_integer_pool() {
    let cands = collect_candidates(&luckdraw());
    assert_eq!(pool_texts(&cands, Operator::LR_I, "900"), vec![vec!["0", "1", "899", "901"]]);
}

#[test]
fn init_guard_comparison_pool_contains_not_equal() {
    let cands = collect_candidates(&luckdraw());
    let pools = pool_texts(&cands, Operator::BOR, "totalTickets == 0");
    assert_eq!(pools.len(), 1);
    assert!(pools[0].contains(&"totalTickets != 0".to_string()));
    assert!(!pools[0].contains(&"totalTickets == 0".to_string()));
}

#[test]
fn modifier_deletion_pool() {
    let unit = luckdraw();
    let cands = collect_candidates(&unit);
    let mord: Vec<&MutationCandidate> =
        cands.iter().filter(|c| c.operators.contains(&Operator::MORD) && !c.pool(Operator::MORD).is_empty()).collect();
    assert_eq!(mord.len(), 3, "one onlyCeo invocation per management function");
    for c in mord {
        let pool = c.pool(Operator::MORD);
        assert_eq!(pool.len(), 1, "only deletion: no other modifier to rename to");
        assert_eq!(pool[0].original, "onlyCeo");
        assert_eq!(pool[0].mutated, "");
    }
}

#[test]
fn modifier_rename_between_same_arity_modifiers() {
    let src = "contract C { address o; bool p;
        modifier a() { require(msg.sender == o); _; }
        modifier b() { require(!p); _; }
        function f() public a { p = true; } }";
    let cands = collect_candidates(&load("c.msol", src).unwrap());
    let texts = pool_texts(&cands, Operator::MORD, "a");
    assert_eq!(texts, vec![vec!["", "b"]]);
}

#[test]
fn qualifier_pool_excludes_current_keywords() {
    let cands = collect_candidates(&luckdraw());
    let qrd: Vec<&Replacement> = cands.iter().flat_map(|c| c.pool(Operator::QRD)).collect();
    assert!(!qrd.is_empty());
    for r in qrd {
        assert_ne!(r.original, r.mutated);
    }
}

#[test]
fn every_candidate_operator_is_applicable() {
    let unit = luckdraw();
    for c in collect_candidates(&unit) {
        assert!(c.span.end > c.span.start);
        for op in c.effective_operators() {
            assert!(c.operators.contains(&op));
            assert!(!c.pool(op).is_empty());
        }
    }
}

#[test]
fn diff_of_literal_mutant() {
    let unit = luckdraw();
    let attempts = enumerate_all(&unit);
    let a = attempts
        .into_iter()
        .find(|a| a.operator == Operator::LR_I && a.replacement.original == "900" && a.replacement.mutated == "1")
        .unwrap();
    let mutants = classify_all(&unit, vec![a]).unwrap();
    assert_eq!(mutants[0].classification, Classification::Viable);
    assert_eq!(mutants[0].diff_text(&unit.unit), "< if(_finalRandomNumber >= 900) {\n> if(_finalRandomNumber >= 1) {");
}

#[test]
fn generation_is_deterministic_per_seed() {
    let unit = luckdraw();
    let cfg = GenerationConfig { target: 20, cap: 200, seed: 42 };
    let (a, sa) = generate(&unit, &cfg).unwrap();
    let (b, sb) = generate(&unit, &cfg).unwrap();
    assert_eq!(sa, sb);
    let key = |ms: &[Mutant]| ms.iter().map(|m| (m.operator, m.span, m.mutated.clone(), m.fingerprint)).collect::<Vec<_>>();
    assert_eq!(key(&a), key(&b));
    let (c, _) = generate(&unit, &GenerationConfig { seed: 43, ..cfg }).unwrap();
    assert_ne!(key(&a), key(&c));
}

#[test]
fn viable_fingerprints_are_unique() {
    let unit = luckdraw();
    let (ms, stats) = generate(&unit, &GenerationConfig { target: 50, cap: 1000, seed: 7 }).unwrap();
    let viable: Vec<_> = ms.iter().filter(|m| m.classification == Classification::Viable).collect();
    assert_eq!(viable.len(), stats.viable);
    let fps: HashSet<_> = viable.iter().map(|m| m.fingerprint.unwrap()).collect();
    assert_eq!(fps.len(), viable.len());
    assert!(viable.iter().all(|m| m.bytecode.is_some()));
    assert!(ms.iter().filter(|m| m.classification == Classification::Stillborn).all(|m| m.bytecode.is_none()));
}

#[test]
fn config_validation() {
    let unit = luckdraw();
    assert_eq!(generate(&unit, &GenerationConfig { target: 0, cap: 5, seed: 0 }).unwrap_err(), GenerateError::ZeroTarget);
    assert_eq!(
        generate(&unit, &GenerationConfig { target: 6, cap: 5, seed: 0 }).unwrap_err(),
        GenerateError::CapBelowTarget { target: 6, cap: 5 }
    );
}

#[test]
fn cap_bounds_attempts() {
    let unit = luckdraw();
    let (ms, stats) = generate(&unit, &GenerationConfig { target: 50, cap: 50, seed: 3 }).unwrap();
    assert_eq!(stats.attempts, 50);
    assert_eq!(ms.len(), 50);
    assert_eq!(stats.exhausted, stats.viable < 50);
}

#[test]
fn mutant_json_record() {
    let unit = luckdraw();
    let (ms, _) = generate(&unit, &GenerationConfig { target: 3, cap: 10, seed: 1 }).unwrap();
    let j = mutants_to_json(&ms);
    let first = &j[0];
    for k in ["id", "operator", "swc_tags", "file", "line", "original", "mutated", "classification"] {
        assert!(first.get(k).is_some(), "missing {k}");
    }
    assert_eq!(first["file"], "Luckdraw.msol");
}

#[test]
fn deleting_a_statement_keeps_other_spans() {
    let unit = luckdraw();
    let a = enumerate_all(&unit)
        .into_iter()
        .find(|a| a.operator == Operator::ESD && a.replacement.original == "totalTickets++;")
        .unwrap();
    let before: Vec<_> = unit.unit.contract().unwrap().functions.iter().map(|f| f.span).collect();
    let after: Vec<_> = a.unit.contract().unwrap().functions.iter().map(|f| f.span).collect();
    assert_eq!(before, after);
    assert!(!mutforge::lang::print(&a.unit).contains("totalTickets++"));
}
