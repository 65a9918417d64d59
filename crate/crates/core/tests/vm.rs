use std::sync::Arc;

use mutforge::compiler::{compile, Bytecode};
use mutforge::lang::load;
use mutforge::vm::*;

const ALICE: Address = Address(0xa1);
const BOB: Address = Address(0xb0b);
const GAS: u64 = 10_000_000;

fn build(src: &str) -> Arc<Bytecode> {
    Arc::new(compile(&load("t.msol", src).expect("checks")).expect("compiles"))
}

fn world() -> WorldState {
    let mut w = WorldState::new();
    w.fund(ALICE, 1_000_000);
    w.fund(BOB, 1_000_000);
    w
}

fn setup(src: &str) -> (WorldState, Address) {
    let mut w = world();
    let (at, out) = deploy(&mut w, build(src), ALICE, vec![], 0, 1, GAS);
    assert_eq!(out.status, Status::Success, "{out:?}");
    (w, at.unwrap())
}

fn call(w: &mut WorldState, at: Address, sender: Address, method: &str, args: Vec<Value>, value: u64) -> TransactionOutcome {
    let tx = Transaction {
        sender,
        target: Target::Call { contract: at, method: method.into() },
        args,
        value,
        timestamp: 2,
        gas_limit: GAS,
    };
    execute_tx(w, &tx)
}

#[test]
fn constructor_sets_owner_to_sender() {
    let (w, at) = setup(
        "contract C { address owner; constructor() { owner = msg.sender; }
           function get() public view returns (address) { return owner; } }",
    );
    assert_eq!(call_pure(&w, at, "get", &[]).unwrap(), CallResult::Value(Value::Address(ALICE)));
}

#[test]
fn deployment_pays_base_cost() {
    let mut w = world();
    let (_, out) = deploy(&mut w, build("contract C { }"), ALICE, vec![], 0, 1, GAS);
    assert_eq!(out.status, Status::Success);
    assert!(out.gas_used >= 21000);
}

#[test]
fn failed_constructor_creates_nothing() {
    let mut w = world();
    let before = w.to_canonical_string();
    let (at, out) = deploy(&mut w, build("contract C { constructor() { require(false); } }"), ALICE, vec![], 0, 1, GAS);
    assert_eq!(out.status, Status::Failed);
    assert_eq!(out.failure, Some(FailureCode::Require));
    assert!(at.is_none());
    assert_eq!(w.to_canonical_string(), before);
}

#[test]
fn pure_and_view_calls() {
    let (mut w, at) = setup(
        "contract C { uint x = 7;
           function k() public pure returns (uint) { return 42; }
           function get() public view returns (uint) { return x; }
           function set(uint v) public { x = v; } }",
    );
    assert_eq!(call_pure(&w, at, "k", &[]).unwrap(), CallResult::Value(Value::Uint(42)));
    assert_eq!(call_pure(&w, at, "get", &[]).unwrap(), CallResult::Value(Value::Uint(7)));
    assert_eq!(call(&mut w, at, BOB, "set", vec![Value::Uint(9)], 0).status, Status::Success);
    let before = w.to_canonical_string();
    assert_eq!(call_pure(&w, at, "get", &[]).unwrap(), CallResult::Value(Value::Uint(9)));
    assert_eq!(w.to_canonical_string(), before);
    assert_eq!(call_pure(&w, at, "set", &[Value::Uint(1)]), Err(VmError::NotReadOnly("set".into())));
}

#[test]
fn reverting_view_is_a_marker() {
    let (w, at) = setup("contract C { function f() public pure returns (uint) { require(false); return 1; } }");
    assert_eq!(call_pure(&w, at, "f", &[]).unwrap(), CallResult::Reverted);
}

#[test]
fn conservation_through_contract() {
    let (mut w, at) = setup(
        "contract C { function pay() public payable { } function out(address to, uint v) public { transfer(to, v); } }",
    );
    let total = w.total_balance();
    assert_eq!(call(&mut w, at, ALICE, "pay", vec![], 500).status, Status::Success);
    assert_eq!(w.balance(at), 500);
    assert_eq!(call(&mut w, at, ALICE, "out", vec![Value::Address(BOB), Value::Uint(500)], 0).status, Status::Success);
    assert_eq!(w.balance(BOB), 1_000_500);
    assert_eq!(w.total_balance(), total);
    let out = call(&mut w, at, ALICE, "out", vec![Value::Address(BOB), Value::Uint(1)], 0);
    assert_eq!(out.failure, Some(FailureCode::InsufficientBalance));
}

#[test]
fn infinite_loop_runs_out_of_gas_exactly() {
    let (mut w, at) = setup("contract C { uint n; function spin() public { while(true) { n += 1; } } }");
    let before = w.to_canonical_string();
    let tx = Transaction {
        sender: ALICE,
        target: Target::Call { contract: at, method: "spin".into() },
        args: vec![],
        value: 0,
        timestamp: 3,
        gas_limit: 123_456,
    };
    let out = execute_tx(&mut w, &tx);
    assert_eq!(out.status, Status::OutOfGas);
    assert_eq!(out.gas_used, 123_456);
    assert!(out.events.is_empty());
    assert_eq!(w.to_canonical_string(), before);
}

#[test]
fn require_failure_rolls_back_events_and_state() {
    let (mut w, at) = setup(
        "contract C { uint x; event E(uint v);
           function f(bool ok) public { x = 5; emit E(1); require(ok, \"nope\"); } }",
    );
    let before = w.to_canonical_string();
    let out = call(&mut w, at, ALICE, "f", vec![Value::Bool(false)], 0);
    assert_eq!(out.status, Status::Failed);
    assert_eq!(out.revert_reason.as_deref(), Some("nope"));
    assert!(out.events.is_empty());
    assert_eq!(w.to_canonical_string(), before);
    let out = call(&mut w, at, ALICE, "f", vec![Value::Bool(true)], 0);
    assert_eq!(out.events, vec![Event { name: "E".into(), values: vec![Value::Uint(1)] }]);
}

#[test]
fn dispatcher_rejects_unknown_internal_and_non_payable() {
    let (mut w, at) = setup(
        "contract C { function g() internal pure returns (uint) { return 1; } function f() public { } }",
    );
    assert_eq!(call(&mut w, at, ALICE, "g", vec![], 0).failure, Some(FailureCode::UnknownSelector));
    assert_eq!(call(&mut w, at, ALICE, "nope", vec![], 0).failure, Some(FailureCode::UnknownSelector));
    assert_eq!(call(&mut w, at, ALICE, "f", vec![], 5).failure, Some(FailureCode::NonPayable));
    assert_eq!(call(&mut w, at, ALICE, "f", vec![], 0).status, Status::Success);
}

#[test]
fn assert_and_division_by_zero_have_distinct_codes() {
    let (mut w, at) = setup(
        "contract C { uint z; function a() public { assert(false); } function d() public { z = 1 / z; } }",
    );
    let a = call(&mut w, at, ALICE, "a", vec![], 0);
    let d = call(&mut w, at, ALICE, "d", vec![], 0);
    assert_eq!((a.status, a.failure), (Status::Failed, Some(FailureCode::Assert)));
    assert_eq!((d.status, d.failure), (Status::Failed, Some(FailureCode::DivisionByZero)));
}

#[test]
fn sender_and_origin_diverge_past_depth_one() {
    let (mut w, at) = setup(
        "contract C { address s1; address s2; address o2;
           function inner() internal { s2 = msg.sender; o2 = tx.origin; }
           function outer() public { s1 = msg.sender; inner(); }
           function get1() public view returns (address) { return s1; }
           function get2() public view returns (address) { return s2; }
           function origin2() public view returns (address) { return o2; } }",
    );
    assert_eq!(call(&mut w, at, BOB, "outer", vec![], 0).status, Status::Success);
    let v = |m: &str| call_pure(&w, at, m, &[]).unwrap();
    assert_eq!(v("get1"), CallResult::Value(Value::Address(BOB)));
    assert_eq!(v("origin2"), CallResult::Value(Value::Address(BOB)));
    assert_eq!(v("get2"), CallResult::Value(Value::Address(at)));
}

#[test]
fn modifiers_returns_and_loops() {
    let (mut w, at) = setup(
        "contract C { address owner; uint hits; mapping(address => uint) bal;
           modifier only { require(msg.sender == owner); _; }
           modifier count(uint k) { hits += k; _; hits += k; }
           constructor() { owner = msg.sender; }
           function sum(uint n) public view only returns (uint) {
               uint s = 0; uint i = 0;
               while(true) { i++; if(i > n) { break; } if(i % 2 == 0) { continue; } s += i; }
               return s;
           }
           function bump(address a) public count(2) count(3) returns (uint) { bal[a] += 10; bal[a]++; return bal[a]; }
           function hitsOf() public view returns (uint) { return hits; }
           function balOf(address a) public view returns (uint) { return bal[a]; } }",
    );
    assert_eq!(call_pure(&w, at, "sum", &[Value::Uint(7)]).unwrap(), CallResult::Reverted);
    let out = call(&mut w, at, ALICE, "sum", vec![Value::Uint(7)], 0);
    assert_eq!(out.return_value, Some(Value::Uint(16)));
    let out = call(&mut w, at, BOB, "bump", vec![Value::Address(BOB)], 0);
    assert_eq!(out.return_value, Some(Value::Uint(11)));
    assert_eq!(call_pure(&w, at, "hitsOf", &[]).unwrap(), CallResult::Value(Value::Uint(10)));
    assert_eq!(call_pure(&w, at, "balOf", &[Value::Address(BOB)]).unwrap(), CallResult::Value(Value::Uint(11)));
}

#[test]
fn gas_is_deterministic_and_limit_monotone() {
    let src = "contract C { uint x; function f(uint n) public { while(x < n) { x += 1; } } }";
    let run = |limit: u64| {
        let (mut w, at) = setup(src);
        let tx = Transaction {
            sender: ALICE,
            target: Target::Call { contract: at, method: "f".into() },
            args: vec![Value::Uint(50)],
            value: 0,
            timestamp: 2,
            gas_limit: limit,
        };
        execute_tx(&mut w, &tx)
    };
    let a = run(GAS);
    let b = run(GAS * 10);
    assert_eq!(a, b);
    assert_eq!(a.status, Status::Success);
    assert_eq!(run(a.gas_used).status, Status::Success);
    assert_eq!(run(a.gas_used - 1).status, Status::OutOfGas);
}
