use std::fs;
use std::path::PathBuf;

use mutforge::lang::visit::{walk_expr, walk_function, walk_stmt, walk_unit, Visitor};
use mutforge::lang::*;
use mutforge::mutation::enumerate_all;
use proptest::prelude::*;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_sources() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "msol"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn minimal_unit() {
    let u = parse("c.msol", "contract C { uint x; }").unwrap();
    let c = u.contract().unwrap();
    assert_eq!(u.contracts.len(), 1);
    assert_eq!(c.state_vars.len(), 1);
    assert!(c.functions.is_empty());
}

#[test]
fn empty_right_hand_side_is_reported() {
    let src = "contract C { function f() public { x = ; } }";
    let diags = parse("c.msol", src).unwrap_err();
    let d = &diags[0];
    assert_eq!(d.severity, Severity::Error);
    assert_eq!(&src[d.span.start as usize..d.span.start as usize + 1], ";");
}

#[test]
fn check_rejects_storage_access_in_pure() {
    let e = load("c.msol", "contract C { uint x; function f() public pure returns (uint) { return x; } }").unwrap_err();
    assert!(e.iter().any(|d| d.severity == Severity::Error));
}

fn summary(u: &SourceUnit) -> String {
    let c = u.contract().unwrap();
    let mut out = vec![format!("contract {}", c.name.name)];
    for v in &c.state_vars {
        out.push(format!("  var {} {}{}", v.ty, v.name.name, if v.init.is_some() { " =" } else { "" }));
    }
    for e in &c.events {
        let ps: Vec<String> = e.params.iter().map(|p| format!("{} {}", p.ty.keyword(), p.name.name)).collect();
        out.push(format!("  event {}({})", e.name.name, ps.join(", ")));
    }
    for m in &c.modifiers {
        out.push(format!("  modifier {} [{} stmts]", m.name.name, m.body.stmts.len()));
    }
    for f in &c.functions {
        let mods: Vec<&str> = f.modifiers.iter().map(|m| m.name.name.as_str()).collect();
        out.push(format!(
            "  fn {} {} {} [{}] {} stmts",
            f.name.name,
            f.visibility.keyword(),
            f.mutability.keyword(),
            mods.join(","),
            f.body.stmts.len()
        ));
    }
    out.join("\n")
}

#[test]
fn luckdraw_golden_summary() {
    let src = fs::read_to_string(corpus_dir().join("Luckdraw.msol")).unwrap();
    let u = parse("Luckdraw.msol", &src).unwrap();
    let expected = "\
contract Luckdraw
  var address ceo
  var address winningAddress
  var uint totalTickets
  var uint ticketPrice
  var uint jackpot
  var uint feePercent =
  var bool paused
  var mapping(address => uint) ticketsOf
  event NewPlay(address player, uint number, bool won)
  modifier onlyCeo [2 stmts]
  fn Play public payable [] 10 stmts
  fn draw internal pure [] 4 stmts
  fn modifyCeo public nonpayable [onlyCeo] 1 stmts
  fn modifyTicketPrice public nonpayable [onlyCeo] 2 stmts
  fn setPaused public nonpayable [onlyCeo] 1 stmts
  fn GetWinningAddress public view [] 1 stmts
  fn GetJackpot public view [] 1 stmts
  fn GetTotalTickets public view [] 1 stmts
  fn GetCeo public view [] 1 stmts
  fn GetTicketsOf external view [] 1 stmts";
    assert_eq!(summary(&u), expected);
    let c = u.contract().unwrap();
    let public_payable = c.functions.iter().filter(|f| f.mutability == Mutability::Payable).count();
    let guarded = c.functions.iter().filter(|f| f.modifiers.iter().any(|m| m.name.name == "onlyCeo")).count();
    assert_eq!((public_payable, guarded, c.events.len()), (1, 3, 1));
}

#[test]
fn corpus_round_trips_and_checks() {
    for (name, src) in corpus_sources() {
        let u = parse(&name, &src).unwrap_or_else(|d| panic!("{name}: {d:?}"));
        let printed = print(&u);
        let again = parse(&name, &printed).unwrap();
        assert!(u.structurally_eq(&again), "{name}");
        assert_eq!(print(&again), printed, "{name}: printing is a fixed point");
        load(&name, &src).unwrap_or_else(|d| panic!("{name}: {d:?}"));
    }
}

/// Every visited node's span lies within the enclosing node's span.
struct Containment {
    stack: Vec<Span>,
    violations: Vec<String>,
}

impl Containment {
    fn enter(&mut self, what: &str, s: Span) {
        if let Some(outer) = self.stack.last() {
            if !outer.contains(&s) {
                self.violations.push(format!("{what} {s:?} escapes {outer:?}"));
            }
        }
        self.stack.push(s);
    }
}

impl Visitor for Containment {
    fn visit_contract(&mut self, c: &ContractDecl) {
        self.enter("contract", c.span);
        mutforge::lang::visit::walk_contract(self, c);
        self.stack.pop();
    }
    fn visit_function(&mut self, f: &FunctionDecl) {
        self.enter("function", f.span);
        walk_function(self, f);
        self.stack.pop();
    }
    fn visit_modifier(&mut self, m: &ModifierDecl) {
        self.enter("modifier", m.span);
        self.visit_block(&m.body);
        self.stack.pop();
    }
    fn visit_block(&mut self, b: &Block) {
        self.enter("block", b.span);
        for s in &b.stmts {
            self.visit_stmt(s);
        }
        self.stack.pop();
    }
    fn visit_stmt(&mut self, s: &Stmt) {
        self.enter("stmt", s.span);
        walk_stmt(self, s);
        self.stack.pop();
    }
    fn visit_expr(&mut self, e: &Expr) {
        self.enter("expr", e.span);
        walk_expr(self, e);
        self.stack.pop();
    }
}

fn assert_contained(u: &SourceUnit) {
    let mut v = Containment { stack: Vec::new(), violations: Vec::new() };
    walk_unit(&mut v, u);
    assert!(v.violations.is_empty(), "{:?}", v.violations);
}

#[test]
fn spans_nest_in_corpus_and_reparsed_mutants() {
    for (name, src) in corpus_sources() {
        let checked = load(&name, &src).unwrap();
        assert_contained(&checked.unit);
        for a in enumerate_all(&checked).iter().step_by(7) {
            let reparsed = parse(&name, &print(&a.unit)).unwrap();
            assert_contained(&reparsed);
        }
    }
}

fn expr_strategy() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0u64..1_000_000).prop_map(|v| v.to_string()),
        Just("a".to_string()),
        Just("b".to_string()),
        Just("msg.value".to_string()),
        Just("block.timestamp".to_string()),
        Just("m[msg.sender]".to_string()),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        let ops = prop::sample::select(vec!["+", "-", "*", "/", "%"]);
        prop_oneof![
            (inner.clone(), ops, inner.clone()).prop_map(|(l, o, r)| format!("({l} {o} {r})")),
            inner.clone().prop_map(|e| format!("(-{e})")),
            (inner.clone(), inner).prop_map(|(l, r)| format!("g({l}, {r})")),
        ]
    })
}

fn cond_strategy() -> impl Strategy<Value = String> {
    let cmp = prop::sample::select(vec!["<", "<=", ">", ">=", "==", "!="]);
    let atom = (expr_strategy(), cmp, expr_strategy()).prop_map(|(l, o, r)| format!("({l} {o} {r})"));
    atom.prop_recursive(2, 8, 2, |inner| {
        let ops = prop::sample::select(vec!["&&", "||"]);
        prop_oneof![
            (inner.clone(), ops, inner.clone()).prop_map(|(l, o, r)| format!("({l} {o} {r})")),
            inner.prop_map(|c| format!("(!{c})")),
        ]
    })
}

fn program(e: &str, c: &str) -> String {
    format!(
        "contract P {{ mapping(address => uint) m;
           function g(uint x, uint y) internal pure returns (uint) {{ return x + y; }}
           function f(uint a, uint b) public payable returns (uint) {{
             uint r = {e};
             if ({c}) {{ r += 1; }} else {{ r -= 1; }}
             while (r > 10) {{ r = r / 2; }}
             return r;
           }} }}"
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_round_trip(e in expr_strategy(), c in cond_strategy()) {
        let src = program(&e, &c);
        let u = parse("p.msol", &src).unwrap();
        let printed = print(&u);
        let again = parse("p.msol", &printed).unwrap();
        prop_assert!(u.structurally_eq(&again));
        prop_assert_eq!(print(&again), printed);
        prop_assert!(load("p.msol", &src).is_ok());
        assert_contained(&u);
        assert_contained(&again);
    }
}
