use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::fuzz::fuzz_args;
use super::limit::compute_glr_checked;
use super::test::ReplayTest;
use crate::compiler::Bytecode;
use crate::lang::ElementaryType;
use crate::vm::{
    call_pure, deploy, execute_tx, Address, CallResult, Event, Status, Target, Transaction, TransactionOutcome, Value,
    WorldState,
};

/// Gas cap for the unmutated replay; large enough to never bind.
pub const ORIGINAL_GAS_CAP: u64 = 1_000_000_000_000;

/// Multiple of glr at which a mutant transaction is cut off.
pub const MUTANT_CAP_FACTOR: u64 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("step {step}: method `{method}` is not callable on the original contract")]
    UnknownMethod { step: usize, method: String },
    #[error("step {step}: expected {expected} argument(s), found {found}")]
    Arity { step: usize, expected: usize, found: usize },
    #[error("step {step}: argument {index} is not a valid {ty}")]
    BadArgument { step: usize, index: usize, ty: &'static str },
    #[error("prefix {prefix} exceeds the {len} steps of the test")]
    PrefixTooLong { prefix: usize, len: usize },
    #[error("deployment of the original contract failed ({0:?})")]
    OriginalDeploymentFailed(Status),
    #[error("traces differ in length ({0} vs {1})")]
    TraceLengthMismatch(usize, usize),
}

/// A read-only method called by the simulated front end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DappMethod {
    pub name: String,
    pub params: Vec<ElementaryType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureCall {
    pub method: String,
    pub args: Vec<Value>,
    pub result: CallResult,
}

/// Observations for one trace index (0 = deployment).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTrace {
    pub status: Status,
    pub gas_used: u64,
    pub events: Vec<Event>,
    pub calls: Vec<PureCall>,
    #[serde(skip)]
    pub executed: BTreeSet<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTrace {
    pub steps: Vec<StepTrace>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Deployment plus the first `prefix` steps.
    pub fn truncate(&self, prefix: usize) -> RunTrace {
        RunTrace { steps: self.steps.iter().take(prefix + 1).cloned().collect() }
    }

    pub fn gas_used(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.gas_used).collect()
    }

    /// Union of executed instruction indices over all steps.
    pub fn executed(&self) -> BTreeSet<usize> {
        self.steps.iter().flat_map(|s| s.executed.iter().copied()).collect()
    }
}

/// Typed transactions of a test, resolved against the original contract's interface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayPlan {
    pub deploy_args: Vec<Value>,
    pub deploy_sender: Address,
    pub deploy_value: u64,
    pub deploy_timestamp: u64,
    pub steps: Vec<PlannedStep>,
    pub methods: Vec<DappMethod>,
    pub accounts: Vec<(Address, u128)>,
    pub fuzz_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedStep {
    pub method: String,
    pub args: Vec<Value>,
    pub sender: Address,
    pub value: u64,
    pub timestamp: u64,
}

fn convert(step: usize, params: &[ElementaryType], raw: &[serde_json::Value]) -> Result<Vec<Value>, HarnessError> {
    if params.len() != raw.len() {
        return Err(HarnessError::Arity { step, expected: params.len(), found: raw.len() });
    }
    params
        .iter()
        .zip(raw)
        .enumerate()
        .map(|(index, (t, v))| Value::from_json(*t, v).ok_or(HarnessError::BadArgument { step, index, ty: t.keyword() }))
        .collect()
}

impl ReplayPlan {
    pub fn new(original: &Bytecode, test: &ReplayTest) -> Result<ReplayPlan, HarnessError> {
        let ctor_params = original.constructor.as_ref().map(|c| c.params.clone()).unwrap_or_default();
        let deploy_args = convert(0, &ctor_params, &test.deployment.args)?;
        let mut steps = Vec::new();
        for (i, s) in test.steps.iter().enumerate() {
            let step = i + 1;
            let entry = original
                .dispatch(&s.method)
                .ok_or_else(|| HarnessError::UnknownMethod { step, method: s.method.clone() })?;
            steps.push(PlannedStep {
                method: s.method.clone(),
                args: convert(step, &entry.params, &s.args)?,
                sender: s.sender,
                value: s.value,
                timestamp: s.timestamp,
            });
        }
        let methods = original
            .dispatcher
            .iter()
            .filter(|d| d.mutability.is_read_only())
            .map(|d| DappMethod { name: d.selector.clone(), params: d.params.clone() })
            .collect();
        Ok(ReplayPlan {
            deploy_args,
            deploy_sender: test.deployment.sender,
            deploy_value: test.deployment.value,
            deploy_timestamp: test.deployment.timestamp,
            steps,
            methods,
            accounts: test.accounts.iter().map(|a| (a.address, a.balance)).collect(),
            fuzz_seed: test.fuzz_seed,
        })
    }

    fn pristine_world(&self) -> WorldState {
        let mut w = WorldState::new();
        for (a, b) in &self.accounts {
            w.fund(*a, *b);
        }
        w
    }

    fn dapp(&self, world: &WorldState, contract: Option<Address>, step: usize) -> Vec<PureCall> {
        let accounts: Vec<Address> = self.accounts.iter().map(|(a, _)| *a).collect();
        self.methods
            .iter()
            .map(|m| {
                let args = fuzz_args(self.fuzz_seed, step, &m.name, &m.params, &accounts);
                let result = contract
                    .and_then(|c| call_pure(world, c, &m.name, &args).ok())
                    .unwrap_or(CallResult::Reverted);
                PureCall { method: m.name.clone(), args, result }
            })
            .collect()
    }
}

/// Gas cap per trace index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GasCaps {
    Unbounded,
    PerStep(Vec<u64>),
}

impl GasCaps {
    fn cap(&self, index: usize) -> u64 {
        match self {
            GasCaps::Unbounded => ORIGINAL_GAS_CAP,
            GasCaps::PerStep(v) => v.get(index).copied().unwrap_or(ORIGINAL_GAS_CAP),
        }
    }
}

fn step_trace(out: TransactionOutcome, calls: Vec<PureCall>) -> StepTrace {
    StepTrace { status: out.status, gas_used: out.gas_used, events: out.events, calls, executed: out.trace }
}

/// Run `code` on a pristine world: deploy, then the first `prefix` steps,
/// calling every read-only method after each.
pub fn replay(code: &Arc<Bytecode>, plan: &ReplayPlan, prefix: usize, caps: &GasCaps) -> Result<RunTrace, HarnessError> {
    if prefix > plan.steps.len() {
        return Err(HarnessError::PrefixTooLong { prefix, len: plan.steps.len() });
    }
    let mut world = plan.pristine_world();
    let (at, out) = deploy(
        &mut world,
        code.clone(),
        plan.deploy_sender,
        plan.deploy_args.clone(),
        plan.deploy_value,
        plan.deploy_timestamp,
        caps.cap(0),
    );
    let calls = plan.dapp(&world, at, 0);
    let mut trace = RunTrace { steps: vec![step_trace(out, calls)] };
    for (i, s) in plan.steps.iter().take(prefix).enumerate() {
        let index = i + 1;
        let out = match at {
            Some(contract) => {
                let tx = Transaction {
                    sender: s.sender,
                    target: Target::Call { contract, method: s.method.clone() },
                    args: s.args.clone(),
                    value: s.value,
                    timestamp: s.timestamp,
                    gas_limit: caps.cap(index),
                };
                execute_tx(&mut world, &tx)
            }
            None => TransactionOutcome {
                status: Status::Failed,
                failure: Some(crate::vm::FailureCode::UnknownSelector),
                revert_reason: None,
                gas_used: crate::compiler::GasTable::standard().base_transaction,
                events: Vec::new(),
                return_value: None,
                trace: BTreeSet::new(),
            },
        };
        let calls = plan.dapp(&world, at, index);
        trace.steps.push(step_trace(out, calls));
    }
    Ok(trace)
}

/// The original contract's replay together with the derived gas limits.
#[derive(Debug, Clone)]
pub struct Baseline {
    pub code: Arc<Bytecode>,
    pub plan: ReplayPlan,
    pub trace: RunTrace,
    /// glr per trace index.
    pub limits: Vec<u64>,
    /// Trace indices whose historic gas used was zero.
    pub zero_guh: Vec<usize>,
}

impl Baseline {
    /// Replay the original over the whole test and derive glr for every step.
    pub fn new(code: Arc<Bytecode>, test: &ReplayTest) -> Result<Baseline, HarnessError> {
        let plan = ReplayPlan::new(&code, test)?;
        let trace = replay(&code, &plan, plan.steps.len(), &GasCaps::Unbounded)?;
        if trace.steps[0].status != Status::Success {
            return Err(HarnessError::OriginalDeploymentFailed(trace.steps[0].status));
        }
        let mut limits = Vec::new();
        let mut zero_guh = Vec::new();
        for (i, ((glh, guh), s)) in test.historic_gas().into_iter().zip(&trace.steps).enumerate() {
            let (glr, warn) = compute_glr_checked(glh, guh, s.gas_used);
            if warn.is_some() {
                zero_guh.push(i);
            }
            limits.push(glr);
        }
        Ok(Baseline { code, plan, trace, limits, zero_guh })
    }

    pub fn mutant_caps(&self) -> GasCaps {
        GasCaps::PerStep(self.limits.iter().map(|l| l.saturating_mul(MUTANT_CAP_FACTOR)).collect())
    }

    /// Replay a mutant over the whole test with the mutant caps.
    pub fn run_mutant(&self, code: &Arc<Bytecode>) -> RunTrace {
        replay(code, &self.plan, self.plan.steps.len(), &self.mutant_caps()).expect("plan fits its own test")
    }
}
