use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vm::Address;

/// Balance given to every account of a test unless the file says otherwise.
pub const DEFAULT_BALANCE: u128 = 1_000_000_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeploymentRecord {
    #[serde(default)]
    pub args: Vec<serde_json::Value>,
    pub sender: Address,
    #[serde(default)]
    pub value: u64,
    pub timestamp: u64,
    pub glh: u64,
    pub guh: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub method: String,
    #[serde(default)]
    pub args: Vec<serde_json::Value>,
    pub sender: Address,
    #[serde(default)]
    pub value: u64,
    pub timestamp: u64,
    pub glh: u64,
    pub guh: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountRecord {
    pub address: Address,
    #[serde(default = "default_balance")]
    pub balance: u128,
}

fn default_balance() -> u128 {
    DEFAULT_BALANCE
}

/// A deployment plus the historic transactions that followed it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayTest {
    pub deployment: DeploymentRecord,
    pub steps: Vec<StepRecord>,
    pub fuzz_seed: u64,
    pub accounts: Vec<AccountRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestFileError {
    #[error("malformed replay test: {0}")]
    Parse(String),
    #[error("step {step}: gas used {guh} exceeds gas limit {glh}")]
    GasUsedAboveLimit { step: usize, glh: u64, guh: u64 },
    #[error("step {step}: timestamp {timestamp} is earlier than the previous one")]
    TimestampDecreasing { step: usize, timestamp: u64 },
    #[error("replay test has no accounts")]
    NoAccounts,
}

impl ReplayTest {
    pub fn from_json(text: &str) -> Result<ReplayTest, TestFileError> {
        let t: ReplayTest = serde_json::from_str(text).map_err(|e| TestFileError::Parse(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("test serializes")
    }

    pub fn validate(&self) -> Result<(), TestFileError> {
        if self.accounts.is_empty() {
            return Err(TestFileError::NoAccounts);
        }
        let d = &self.deployment;
        if d.guh > d.glh {
            return Err(TestFileError::GasUsedAboveLimit { step: 0, glh: d.glh, guh: d.guh });
        }
        let mut last = d.timestamp;
        for (i, s) in self.steps.iter().enumerate() {
            let step = i + 1;
            if s.guh > s.glh {
                return Err(TestFileError::GasUsedAboveLimit { step, glh: s.glh, guh: s.guh });
            }
            if s.timestamp < last {
                return Err(TestFileError::TimestampDecreasing { step, timestamp: s.timestamp });
            }
            last = s.timestamp;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Historic (glh, guh) per trace index; index 0 is the deployment.
    pub fn historic_gas(&self) -> Vec<(u64, u64)> {
        std::iter::once((self.deployment.glh, self.deployment.guh))
            .chain(self.steps.iter().map(|s| (s.glh, s.guh)))
            .collect()
    }

    pub fn account_addresses(&self) -> Vec<Address> {
        self.accounts.iter().map(|a| a.address).collect()
    }
}
