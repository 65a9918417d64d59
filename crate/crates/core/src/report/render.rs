use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::campaign::CampaignReport;
use super::table::{Contingency, ContingencyRow};
use crate::harness::Conditions;
use crate::mutation::Classification;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown report format `{0}` (expected json, csv or text)")]
pub struct UnknownFormat(pub String);

impl FromStr for Format {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            _ => Err(UnknownFormat(s.to_string())),
        }
    }
}

pub fn render_report(report: &CampaignReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => render_json(report).into_bytes(),
        Format::Csv => render_csv(&report.contingency),
        Format::Text => render_text(report).into_bytes(),
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn render_json(report: &CampaignReport) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    serde_json::to_string_pretty(&value).expect("value serializes") + "\n"
}

const CSV_HEADER: [&str; 6] = ["operator", "not_killed", "killed", "total", "not_killed_pct", "killed_pct"];

fn pct(v: Option<f64>) -> String {
    v.map(|p| format!("{p:.1}")).unwrap_or_default()
}

/// Operator rows followed by the totals row.
pub fn render_csv(table: &Contingency) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in table.rows.iter().chain(std::iter::once(&table.total)) {
        w.write_record([
            r.operator.clone(),
            r.not_killed.to_string(),
            r.killed.to_string(),
            r.total.to_string(),
            pct(r.not_killed_pct),
            pct(r.killed_pct),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Parse rows written by [`render_csv`].
pub fn parse_csv(bytes: &[u8]) -> Result<Vec<ContingencyRow>, csv::Error> {
    let mut r = csv::Reader::from_reader(bytes);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| rec.get(i).and_then(|s| s.parse().ok()).unwrap_or(0);
        out.push(ContingencyRow::new(rec.get(0).unwrap_or_default(), num(1), num(2)));
    }
    Ok(out)
}

fn score_text(s: Option<f64>) -> String {
    s.map(|s| format!("{:.1}%", 100.0 * s)).unwrap_or_else(|| "n/a".into())
}

fn table_text(out: &mut String, t: &Contingency) {
    let _ = writeln!(out, "{:<8} {:>10} {:>8} {:>8} {:>11} {:>8}", "operator", "not killed", "killed", "total", "not killed", "killed");
    for r in t.rows.iter().chain(std::iter::once(&t.total)) {
        let p = |v: Option<f64>| v.map(|p| format!("{p:.1}%")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<8} {:>10} {:>8} {:>8} {:>11} {:>8}",
            r.operator,
            r.not_killed,
            r.killed,
            r.total,
            p(r.not_killed_pct),
            p(r.killed_pct)
        );
    }
    let c = &t.chi_square;
    let p = c.p_value.map(|p| format!("{p:.3e}")).unwrap_or_else(|| "n/a".into());
    let _ = writeln!(out, "chi2={:.1}, df={}, p={p}", c.statistic, c.df);
}

pub fn render_text(report: &CampaignReport) -> String {
    let mut out = String::new();
    let t = &report.totals;
    let _ = writeln!(out, "mutforge report (seed {}, target {}, cap {})", report.seed, report.target, report.cap);
    let _ = writeln!(
        out,
        "{} contracts, {} attempts: {} stillborn, {} duplicate, {} viable, {} killed",
        t.contracts, t.attempts, t.stillborn, t.duplicate, t.viable, t.killed
    );
    for (k, s) in &report.scores {
        let _ = writeln!(out, "score {k}: {}", score_text(*s));
    }
    if let Some(tau) = report.kendall_tau {
        let _ = writeln!(out, "kendall tau (bytecode length vs score): {tau:.3}");
    }
    for e in &report.excluded {
        let _ = writeln!(out, "excluded {}: {}", e.name, e.reason);
    }
    out.push('\n');
    table_text(&mut out, &report.contingency);
    let all = Conditions::ALL.to_string();
    for c in &report.contracts {
        let score = c.scores.get(&all).copied().flatten();
        let _ = writeln!(
            out,
            "\n== {} ({} steps, coverage {:.1}%, {} viable, score {})",
            c.name,
            c.steps,
            100.0 * c.coverage,
            c.generation.viable,
            score_text(score)
        );
        for m in c.mutants.iter().filter(|m| m.classification == Classification::Viable) {
            let v = m.verdict.as_ref();
            let status = match v {
                Some(v) if v.killed => {
                    let by: Vec<&str> =
                        v.conditions.iter().filter(|(_, s)| s.is_some()).map(|(k, _)| k.as_str()).collect();
                    format!("killed at step {} by {}", v.first_kill.unwrap_or(0), by.join(","))
                }
                _ => "survived".to_string(),
            };
            let _ = writeln!(out, "#{} {} line {}: {status}", m.id, m.operator.label(), m.line);
            if !m.diff.is_empty() {
                let _ = writeln!(out, "{}", m.diff);
            }
        }
    }
    out
}
