use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The fourteen mutation operators.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    AOR,
    BOR,
    ESD,
    ITSCR,
    JSRD,
    LR_A,
    LR_B,
    LR_I,
    LR_S,
    MORD,
    QRD,
    RAR,
    UORD,
    VDTSCS,
}

impl Operator {
    pub const ALL: [Operator; 14] = [
        Operator::AOR,
        Operator::BOR,
        Operator::ESD,
        Operator::ITSCR,
        Operator::JSRD,
        Operator::LR_A,
        Operator::LR_B,
        Operator::LR_I,
        Operator::LR_S,
        Operator::MORD,
        Operator::QRD,
        Operator::RAR,
        Operator::UORD,
        Operator::VDTSCS,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Operator::AOR => "AOR",
            Operator::BOR => "BOR",
            Operator::ESD => "ESD",
            Operator::ITSCR => "ITSCR",
            Operator::JSRD => "JSRD",
            Operator::LR_A => "LR_A",
            Operator::LR_B => "LR_B",
            Operator::LR_I => "LR_I",
            Operator::LR_S => "LR_S",
            Operator::MORD => "MORD",
            Operator::QRD => "QRD",
            Operator::RAR => "RAR",
            Operator::UORD => "UORD",
            Operator::VDTSCS => "VDTSCS",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Operator::AOR => "Assignment Operator Replacement",
            Operator::BOR => "Binary Operator Replacement",
            Operator::ESD => "Expression Statement Deletion",
            Operator::ITSCR => "Identifier with same Type, Scope, and Constancy Replacement",
            Operator::JSRD => "Jump Statement Replacement/Deletion",
            Operator::LR_A => "Literal Address Replacement",
            Operator::LR_B => "Literal Boolean Replacement",
            Operator::LR_I => "Literal Integer Replacement",
            Operator::LR_S => "Literal String Replacement",
            Operator::MORD => "Modifier Replacement/Deletion",
            Operator::QRD => "Qualifier for storage local or state mutability Replacement/Deletion",
            Operator::RAR => "R-Value Address Replacement",
            Operator::UORD => "Unary Operator Replacement/Deletion",
            Operator::VDTSCS => "Variable Declaration with same Type, Scope and Constancy Swap",
        }
    }

    /// Operators with no counterpart in general-purpose mutation tools.
    pub fn solidity_specific(self) -> bool {
        matches!(self, Operator::LR_A | Operator::MORD | Operator::QRD | Operator::RAR)
    }

    /// Related weakness classification ids; informational only.
    pub fn swc_tags(self) -> &'static [u16] {
        match self {
            Operator::AOR | Operator::BOR | Operator::UORD => &[129],
            Operator::ITSCR => &[105, 106],
            Operator::LR_A | Operator::RAR => &[115],
            Operator::MORD => &[105, 106, 123],
            Operator::QRD => &[100, 108],
            _ => &[],
        }
    }

    /// Code with an asterisk for the language-specific operators.
    pub fn label(self) -> String {
        if self.solidity_specific() {
            format!("{}*", self.code())
        } else {
            self.code().to_string()
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mutation operator `{0}`")]
pub struct UnknownOperator(pub String);

impl FromStr for Operator {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim_end_matches('*');
        Operator::ALL
            .into_iter()
            .find(|o| o.code().eq_ignore_ascii_case(key))
            .ok_or_else(|| UnknownOperator(s.to_string()))
    }
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
