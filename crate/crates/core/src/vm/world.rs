use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map};

use super::value::{Address, Value};
use crate::compiler::Bytecode;
use crate::Word;

/// First address handed out to deployed contracts.
pub const CONTRACT_ADDRESS_BASE: Word = 0xc0_0000;

/// Storage location: a plain slot or one entry of a mapping slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StorageKey {
    Slot(u64),
    Entry(u64, Address),
}

impl fmt::Display for StorageKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StorageKey::Slot(s) => write!(f, "{s}"),
            StorageKey::Entry(s, k) => write!(f, "{s}:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractAccount {
    pub code: Arc<Bytecode>,
    /// Zero values are never stored.
    pub storage: BTreeMap<StorageKey, Value>,
}

impl ContractAccount {
    pub fn load(&self, key: StorageKey) -> Option<&Value> {
        self.storage.get(&key)
    }

    pub fn store(&mut self, key: StorageKey, v: Value) {
        if v.is_zero() {
            self.storage.remove(&key);
        } else {
            self.storage.insert(key, v);
        }
    }
}

/// Accounts, deployed contracts and the clock.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WorldState {
    pub balances: BTreeMap<Address, u128>,
    pub contracts: BTreeMap<Address, ContractAccount>,
    /// Timestamp of the last successful transaction.
    pub timestamp: u64,
    pub deployed: u64,
}

impl WorldState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Credit an externally owned account. The only way balance enters the world.
    pub fn fund(&mut self, account: Address, amount: u128) {
        *self.balances.entry(account).or_insert(0) += amount;
    }

    pub fn balance(&self, account: Address) -> u128 {
        self.balances.get(&account).copied().unwrap_or(0)
    }

    pub fn total_balance(&self) -> u128 {
        self.balances.values().sum()
    }

    pub fn contract(&self, at: Address) -> Option<&ContractAccount> {
        self.contracts.get(&at)
    }

    pub fn next_contract_address(&self) -> Address {
        Address(CONTRACT_ADDRESS_BASE + self.deployed)
    }

    /// Move `amount` between accounts; false if the source lacks funds.
    pub fn transfer(&mut self, from: Address, to: Address, amount: u128) -> bool {
        if amount == 0 {
            return true;
        }
        let have = self.balance(from);
        if have < amount {
            return false;
        }
        self.balances.insert(from, have - amount);
        *self.balances.entry(to).or_insert(0) += amount;
        true
    }

    /// Canonical JSON with sorted keys; code is represented by its fingerprint.
    pub fn to_json(&self) -> serde_json::Value {
        let balances: Map<String, serde_json::Value> =
            self.balances.iter().map(|(a, b)| (a.to_string(), json!(b.to_string()))).collect();
        let contracts: Map<String, serde_json::Value> = self
            .contracts
            .iter()
            .map(|(a, c)| {
                let storage: Map<String, serde_json::Value> =
                    c.storage.iter().map(|(k, v)| (k.to_string(), v.to_json())).collect();
                (a.to_string(), json!({ "code": c.code.fingerprint().to_string(), "storage": storage }))
            })
            .collect();
        json!({
            "balances": balances,
            "contracts": contracts,
            "deployed": self.deployed,
            "timestamp": self.timestamp,
        })
    }

    pub fn to_canonical_string(&self) -> String {
        self.to_json().to_string()
    }
}
