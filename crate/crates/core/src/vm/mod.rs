//! Execution of deployments, transactions and read-only calls.

pub mod interp;
pub mod value;
pub mod world;

pub use interp::{
    call_pure, deploy, execute_tx, execute_with, CallResult, Event, FailureCode, Status, Target, Transaction,
    TransactionOutcome, VmError, MAX_CALL_DEPTH, PURE_CALL_GAS,
};
pub use value::{Address, AddressParseError, Value};
pub use world::{ContractAccount, StorageKey, WorldState, CONTRACT_ADDRESS_BASE};
