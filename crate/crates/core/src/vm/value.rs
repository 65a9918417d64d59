use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lang::ElementaryType;
use crate::Word;

/// Account or contract address. Addresses are small deterministic integers
/// rendered as 40-digit hex.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address(pub Word);

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:040x}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid address `{0}`")]
pub struct AddressParseError(pub String);

impl FromStr for Address {
    type Err = AddressParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix("0x")
            .or_else(|| s.strip_prefix("0X"))
            .ok_or_else(|| AddressParseError(s.to_string()))?;
        let trimmed = digits.trim_start_matches('0');
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(AddressParseError(s.to_string()));
        }
        if trimmed.is_empty() {
            return Ok(Address(0));
        }
        Word::from_str_radix(trimmed, 16).map(Address).map_err(|_| AddressParseError(s.to_string()))
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Runtime value. Integers are 64-bit words with wrap-around arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    Uint(Word),
    Bool(bool),
    Address(Address),
    Str(String),
}

impl Value {
    pub fn zero(ty: ElementaryType) -> Value {
        match ty {
            ElementaryType::Uint => Value::Uint(0),
            ElementaryType::Bool => Value::Bool(false),
            ElementaryType::Address => Value::Address(Address(0)),
            ElementaryType::String => Value::Str(String::new()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Uint(v) => *v == 0,
            Value::Bool(b) => !b,
            Value::Address(a) => a.0 == 0,
            Value::Str(s) => s.is_empty(),
        }
    }

    /// Storage and event payload size in 32-byte words.
    pub fn words(&self) -> u64 {
        match self {
            Value::Str(s) => (s.len() as u64).div_ceil(32).max(1),
            _ => 1,
        }
    }

    pub fn ty(&self) -> ElementaryType {
        match self {
            Value::Uint(_) => ElementaryType::Uint,
            Value::Bool(_) => ElementaryType::Bool,
            Value::Address(_) => ElementaryType::Address,
            Value::Str(_) => ElementaryType::String,
        }
    }

    pub fn as_uint(&self) -> Option<Word> {
        match self {
            Value::Uint(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_address(&self) -> Option<Address> {
        match self {
            Value::Address(a) => Some(*a),
            _ => None,
        }
    }

    /// Convert a JSON argument according to the declared parameter type.
    /// Addresses are hex strings; uints are non-negative integers or
    /// decimal strings.
    pub fn from_json(ty: ElementaryType, v: &serde_json::Value) -> Option<Value> {
        match ty {
            ElementaryType::Uint => match v {
                serde_json::Value::Number(n) => n.as_u64().map(Value::Uint),
                serde_json::Value::String(s) => s.parse().ok().map(Value::Uint),
                _ => None,
            },
            ElementaryType::Bool => v.as_bool().map(Value::Bool),
            ElementaryType::Address => v.as_str()?.parse().ok().map(Value::Address),
            ElementaryType::String => v.as_str().map(|s| Value::Str(s.to_string())),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Uint(v) => serde_json::Value::from(*v),
            Value::Bool(b) => serde_json::Value::from(*b),
            Value::Address(a) => serde_json::Value::from(a.to_string()),
            Value::Str(s) => serde_json::Value::from(s.clone()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Uint(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Address(a) => write!(f, "{a}"),
            Value::Str(s) => write!(f, "{s:?}"),
        }
    }
}
