use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::replay::{HarnessError, RunTrace};

/// One kill condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    Tx,
    Ev,
    Meth,
    Limit,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::Tx, Condition::Ev, Condition::Meth, Condition::Limit];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Tx => "Tx",
            Condition::Ev => "Ev",
            Condition::Meth => "Meth",
            Condition::Limit => "Limit",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionsError {
    #[error("unknown kill condition `{0}` (expected tx, ev, meth or limit)")]
    Unknown(String),
    #[error("no kill condition given")]
    Empty,
}

impl FromStr for Condition {
    type Err = ConditionsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tx" => Ok(Condition::Tx),
            "ev" => Ok(Condition::Ev),
            "meth" => Ok(Condition::Meth),
            "limit" => Ok(Condition::Limit),
            _ => Err(ConditionsError::Unknown(s.trim().to_string())),
        }
    }
}

/// A non-empty set of kill conditions, written like `TxEvMeth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conditions(u8);

impl Conditions {
    pub const TX: Conditions = Conditions(1);
    pub const TX_EV_METH: Conditions = Conditions(0b0111);
    pub const ALL: Conditions = Conditions(0b1111);
    pub const LIMIT: Conditions = Conditions(0b1000);

    pub fn new(cs: &[Condition]) -> Result<Conditions, ConditionsError> {
        let bits = cs.iter().fold(0, |acc, c| acc | c.bit());
        if bits == 0 {
            return Err(ConditionsError::Empty);
        }
        Ok(Conditions(bits))
    }

    pub fn contains(self, c: Condition) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Condition> {
        Condition::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    /// Every non-empty subset, in bit order.
    pub fn all_subsets() -> Vec<Conditions> {
        (1..16).map(Conditions).collect()
    }
}

impl fmt::Display for Conditions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.iter() {
            f.write_str(c.name())?;
        }
        Ok(())
    }
}

impl FromStr for Conditions {
    type Err = ConditionsError;

    /// Accepts `tx,ev,meth` as well as `TxEvMeth`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cs = Vec::new();
        if s.contains(',') {
            for part in s.split(',').filter(|p| !p.trim().is_empty()) {
                cs.push(part.parse()?);
            }
        } else {
            let mut rest = s.trim();
            'outer: while !rest.is_empty() {
                for c in Condition::ALL {
                    let n = c.name();
                    if rest.len() >= n.len() && rest[..n.len()].eq_ignore_ascii_case(n) {
                        cs.push(c);
                        rest = &rest[n.len()..];
                        continue 'outer;
                    }
                }
                return Err(ConditionsError::Unknown(rest.to_string()));
            }
        }
        Conditions::new(&cs)
    }
}

impl Serialize for Conditions {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Conditions {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Earliest trace index at which each condition fired, regardless of the
/// requested set. A verdict for any subset is derived from it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Firings {
    pub tx: Option<usize>,
    pub ev: Option<usize>,
    pub meth: Option<usize>,
    pub limit: Option<usize>,
}

impl Firings {
    pub fn get(&self, c: Condition) -> Option<usize> {
        match c {
            Condition::Tx => self.tx,
            Condition::Ev => self.ev,
            Condition::Meth => self.meth,
            Condition::Limit => self.limit,
        }
    }

    fn set_first(&mut self, c: Condition, step: usize) {
        let slot = match c {
            Condition::Tx => &mut self.tx,
            Condition::Ev => &mut self.ev,
            Condition::Meth => &mut self.meth,
            Condition::Limit => &mut self.limit,
        };
        slot.get_or_insert(step);
    }

    /// Firings that happened within the first `prefix` steps.
    pub fn within(&self, prefix: usize) -> Firings {
        let keep = |s: Option<usize>| s.filter(|k| *k <= prefix);
        Firings { tx: keep(self.tx), ev: keep(self.ev), meth: keep(self.meth), limit: keep(self.limit) }
    }

    pub fn verdict(&self, conditions: Conditions) -> KillVerdict {
        let mut v = KillVerdict::default();
        for c in conditions.iter() {
            if let Some(k) = self.get(c) {
                v.conditions[c as usize] = Some(k);
                v.first_kill = Some(v.first_kill.map_or(k, |f: usize| f.min(k)));
            }
        }
        v.killed = v.first_kill.is_some();
        v
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct KillVerdict {
    pub killed: bool,
    pub first_kill: Option<usize>,
    /// Indexed by `Condition as usize`; only requested conditions can be set.
    pub conditions: [Option<usize>; 4],
}

impl KillVerdict {
    pub fn fired(&self, c: Condition) -> Option<usize> {
        self.conditions[c as usize]
    }

    pub fn to_json(&self, id: usize) -> serde_json::Value {
        let conditions: serde_json::Map<String, serde_json::Value> =
            Condition::ALL.iter().map(|c| (c.name().to_string(), json!(self.fired(*c)))).collect();
        json!({
            "id": id,
            "killed": self.killed,
            "first_kill": self.first_kill,
            "conditions": conditions,
        })
    }
}

/// Compare a mutant trace with the original's, step by step.
pub fn firings(original: &RunTrace, mutant: &RunTrace, limits: &[u64]) -> Result<Firings, HarnessError> {
    if original.len() != mutant.len() {
        return Err(HarnessError::TraceLengthMismatch(original.len(), mutant.len()));
    }
    let mut f = Firings::default();
    for (k, (o, m)) in original.steps.iter().zip(&mutant.steps).enumerate() {
        if o.status != m.status {
            f.set_first(Condition::Tx, k);
        }
        if o.events != m.events {
            f.set_first(Condition::Ev, k);
        }
        if o.calls.iter().map(|c| &c.result).ne(m.calls.iter().map(|c| &c.result)) {
            f.set_first(Condition::Meth, k);
        }
        if limits.get(k).is_some_and(|glr| m.gas_used > *glr) {
            f.set_first(Condition::Limit, k);
        }
    }
    Ok(f)
}

/// Kill verdict under `conditions`; `limits` holds glr per trace index.
pub fn judge(
    original: &RunTrace,
    mutant: &RunTrace,
    conditions: Conditions,
    limits: &[u64],
) -> Result<KillVerdict, HarnessError> {
    Ok(firings(original, mutant, limits)?.verdict(conditions))
}
