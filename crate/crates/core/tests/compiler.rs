use std::collections::BTreeSet;

use mutforge::compiler::*;
use mutforge::lang::{load, Visibility};

fn build(src: &str) -> Bytecode {
    compile(&load("t.msol", src).expect("checks")).expect("compiles")
}

const SAMPLE: &str = "contract C { address owner; uint n; event E(uint v);
    modifier only { require(msg.sender == owner); _; }
    constructor() { owner = msg.sender; }
    function helper(uint a) internal pure returns (uint) { return a * 2 + 1; }
    function f(uint a) public only returns (uint) { while(n < a) { n += helper(1); } emit E(n); return n; }
    function g() external view returns (uint) { if(n > 3 && n != 7) { return 1; } else { return 0; } }
    function h() private { n = 0; } }";

#[test]
fn empty_contract_is_dispatcher_prologue() {
    let b = build("contract C { }");
    let ops: Vec<Opcode> = b.instructions.iter().map(|i| i.op).collect();
    assert_eq!(ops, vec![Opcode::Dispatch, Opcode::Halt]);
    assert!(b.dispatcher.is_empty());
    assert!(b.constructor.is_none());
}

#[test]
fn compilation_is_deterministic() {
    let a = build(SAMPLE);
    let b = build(SAMPLE);
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_eq!(a.fingerprint(), b.fingerprint());
}

#[test]
fn jump_targets_are_valid() {
    let b = build(SAMPLE);
    for i in &b.instructions {
        if i.op.is_jump() {
            assert!((i.operand.unwrap() as usize) < b.len());
        }
    }
    for d in &b.dispatcher {
        assert!(d.entry < b.len());
        assert!(d.modifier_entries.iter().all(|e| *e < b.len()));
    }
}

#[test]
fn dispatcher_holds_exactly_public_and_external() {
    let b = build(SAMPLE);
    let names: Vec<&str> = b.dispatcher.iter().map(|d| d.selector.as_str()).collect();
    assert_eq!(names, vec!["f", "g"]);
    assert_eq!(b.dispatch("g").unwrap().visibility, Visibility::External);
    assert!(b.dispatch("helper").is_none());
    assert!(b.dispatch("h").is_none());
    assert_eq!(b.dispatch("f").unwrap().modifier_entries.len(), 1);
}

#[test]
fn gas_is_resolved_from_table() {
    let b = build(SAMPLE);
    let t = GasTable::standard();
    assert!(b.instructions.iter().all(|i| i.gas == t.cost(i.op)));
    let listing: serde_json::Value = serde_json::from_str(&b.listing_json()).unwrap();
    assert_eq!(listing.as_array().unwrap().len(), b.len());
    assert_eq!(listing[0]["opcode"], "Dispatch");
}

#[test]
fn every_single_operand_perturbation_changes_the_digest() {
    let b = build(SAMPLE);
    let base = b.fingerprint();
    let mut seen = BTreeSet::from([base]);
    for i in 0..b.len() {
        for delta in [1u64, 2] {
            let mut m = b.clone();
            let ins = &mut m.instructions[i];
            ins.operand = Some(ins.operand.unwrap_or(0).wrapping_add(delta));
            let fp = m.fingerprint();
            assert_ne!(fp, base, "instruction {i}");
            assert!(seen.insert(fp), "collision at instruction {i}");
        }
    }
}

#[test]
fn dispatcher_flags_feed_the_digest() {
    let a = build("contract C { function f() public { } }");
    let b = build("contract C { function f() external { } }");
    let c = build("contract C { function f() public payable { } }");
    assert_eq!(a.instructions, b.instructions);
    assert_ne!(a.fingerprint(), b.fingerprint());
    assert_ne!(a.fingerprint(), c.fingerprint());
}

#[test]
fn qualifier_change_on_internal_helper_is_invisible() {
    let a = build(
        "contract C { function h() internal pure returns (uint) { return 1; }
           function f() public pure returns (uint) { return h(); } }",
    );
    let b = build(
        "contract C { function h() private pure returns (uint) { return 1; }
           function f() public pure returns (uint) { return h(); } }",
    );
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_eq!(a.fingerprint(), b.fingerprint());
}

#[test]
fn coverage_bounds_and_errors() {
    let b = build(SAMPLE);
    let all: BTreeSet<usize> = (0..b.len()).collect();
    assert_eq!(coverage::<f64>(&all, &b).unwrap(), 1.0);
    assert_eq!(coverage::<f64>(&BTreeSet::new(), &b).unwrap(), 0.0);
    let half: BTreeSet<usize> = (0..b.len() / 2).collect();
    let c = coverage::<f64>(&half, &b).unwrap();
    assert!((c - (b.len() / 2) as f64 / b.len() as f64).abs() < 1e-12);
    let bad = BTreeSet::from([b.len()]);
    assert_eq!(coverage::<f64>(&bad, &b), Err(CoverageError { index: b.len(), len: b.len() }));
}
