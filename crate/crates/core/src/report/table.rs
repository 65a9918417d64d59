use serde::{Deserialize, Serialize};

use crate::mutation::Operator;
use crate::stats::{chi_square, ChiSquare};
use crate::Score;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyRow {
    /// Operator label, or `Total`.
    pub operator: String,
    pub not_killed: u64,
    pub killed: u64,
    pub total: u64,
    pub not_killed_pct: Option<Score>,
    pub killed_pct: Option<Score>,
}

impl ContingencyRow {
    pub fn new(operator: impl Into<String>, not_killed: u64, killed: u64) -> ContingencyRow {
        let total = not_killed + killed;
        let pct = |v: u64| (total > 0).then(|| 100.0 * v as Score / total as Score);
        ContingencyRow {
            operator: operator.into(),
            not_killed,
            killed,
            total,
            not_killed_pct: pct(not_killed),
            killed_pct: pct(killed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contingency {
    pub rows: Vec<ContingencyRow>,
    pub total: ContingencyRow,
    pub chi_square: ChiSquare<Score>,
}

impl Contingency {
    /// Build from (operator label, not killed, killed) counts; empty rows are dropped.
    pub fn from_counts(counts: &[(String, u64, u64)]) -> Contingency {
        let rows: Vec<ContingencyRow> = counts
            .iter()
            .filter(|(_, n, k)| n + k > 0)
            .map(|(op, n, k)| ContingencyRow::new(op.clone(), *n, *k))
            .collect();
        let total = ContingencyRow::new(
            "Total",
            rows.iter().map(|r| r.not_killed).sum(),
            rows.iter().map(|r| r.killed).sum(),
        );
        let cells: Vec<[u64; 2]> = rows.iter().map(|r| [r.not_killed, r.killed]).collect();
        Contingency { rows, total, chi_square: chi_square(&cells) }
    }
}

/// Operators against killed / not killed, in operator order.
pub fn contingency_table(verdicts: &[(Operator, bool)]) -> Contingency {
    let counts: Vec<(String, u64, u64)> = Operator::ALL
        .iter()
        .map(|op| {
            let here = verdicts.iter().filter(|(o, _)| o == op);
            let killed = here.clone().filter(|(_, k)| *k).count() as u64;
            let not_killed = here.filter(|(_, k)| !*k).count() as u64;
            (op.label(), not_killed, killed)
        })
        .collect();
    Contingency::from_counts(&counts)
}
