//! Replay tests, the gas-limit heuristic and kill judgement.

mod fuzz;
mod judge;
mod limit;
mod replay;
mod score;
mod test;

pub use fuzz::{fuzz_args, signature};
pub use judge::{firings, judge, Condition, Conditions, ConditionsError, Firings, KillVerdict};
pub use limit::{compute_glr, compute_glr_checked, ZeroGasUsed};
pub use replay::{
    replay, Baseline, DappMethod, GasCaps, HarnessError, PlannedStep, PureCall, ReplayPlan, RunTrace, StepTrace,
    MUTANT_CAP_FACTOR, ORIGINAL_GAS_CAP,
};
pub use score::{ci_half_width, mutation_score, score_curve, score_of, CurvePoint};
pub use test::{AccountRecord, DeploymentRecord, ReplayTest, StepRecord, TestFileError, DEFAULT_BALANCE};
