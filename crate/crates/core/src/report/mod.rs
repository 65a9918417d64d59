//! Corpus campaigns and their reports.

mod campaign;
mod render;
mod table;

pub use campaign::{
    contract_seed, run_corpus, scan_corpus, CampaignConfig, CampaignError, CampaignReport, ContractReport, CorpusEntry,
    Exclusion, MutantRecord, Totals, VerdictRecord, SOURCE_EXT, TEST_SUFFIX,
};
pub use render::{parse_csv, render_csv, render_json, render_report, render_text, Format, UnknownFormat};
pub use table::{contingency_table, Contingency, ContingencyRow};
