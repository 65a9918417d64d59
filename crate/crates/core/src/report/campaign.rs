use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::table::{contingency_table, Contingency};
use crate::compiler::{compile, coverage};
use crate::harness::{firings, score_curve, Baseline, Conditions, CurvePoint, Firings, KillVerdict, ReplayTest};
use crate::lang::load;
use crate::mutation::{generate, Classification, GenerationConfig, GenerationStats, Mutant, Operator};
use crate::stats::kendall_tau;
use crate::Score;

/// Extension of contract sources in a corpus directory.
pub const SOURCE_EXT: &str = "msol";
/// Suffix of the replay test next to each source.
pub const TEST_SUFFIX: &str = ".test.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub corpus: PathBuf,
    pub generation: GenerationConfig,
    /// Condition sets reported next to TxEvMethLimit.
    pub condition_sets: Vec<Conditions>,
    pub prefixes: Vec<usize>,
    pub workers: usize,
}

impl CampaignConfig {
    pub fn new(corpus: impl Into<PathBuf>, seed: u64) -> CampaignConfig {
        CampaignConfig {
            corpus: corpus.into(),
            generation: GenerationConfig { seed, ..GenerationConfig::default() },
            condition_sets: vec![
                Conditions::TX,
                Conditions::TX_EV_METH,
                Conditions::LIMIT,
                Conditions::ALL,
            ],
            prefixes: vec![0, 1, 2, 3, 5, 10, 20, 30, 40, 50],
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.condition_sets.is_empty() {
            return Err(CampaignError::NoConditions);
        }
        if self.workers == 0 {
            return Err(CampaignError::NoWorkers);
        }
        if self.prefixes.windows(2).any(|w| w[0] > w[1]) {
            return Err(CampaignError::UnsortedPrefixes);
        }
        self.generation.validate().map_err(|e| CampaignError::Generation(e.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("at least one condition set is required")]
    NoConditions,
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("prefixes must be sorted ascending")]
    UnsortedPrefixes,
    #[error("invalid generation config: {0}")]
    Generation(String),
    #[error("cannot read corpus {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// One source file and its replay test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub source: PathBuf,
    pub test: PathBuf,
}

/// Corpus entries sorted by file name.
pub fn scan_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, CampaignError> {
    let io = |source| CampaignError::Io { path: dir.to_path_buf(), source };
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().and_then(|e| e.to_str()) != Some(SOURCE_EXT) {
            continue;
        }
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let test = dir.join(format!("{name}{TEST_SUFFIX}"));
        out.push(CorpusEntry { name, source: path, test });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

/// Seed for one contract, so adding a file leaves the others' mutants unchanged.
pub fn contract_seed(seed: u64, name: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub killed: bool,
    pub first_kill: Option<usize>,
    pub conditions: BTreeMap<String, Option<usize>>,
}

impl From<KillVerdict> for VerdictRecord {
    fn from(v: KillVerdict) -> Self {
        let conditions = crate::harness::Condition::ALL.iter().map(|c| (c.name().to_string(), v.fired(*c))).collect();
        VerdictRecord { killed: v.killed, first_kill: v.first_kill, conditions }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub id: usize,
    pub operator: Operator,
    pub line: u32,
    pub original: String,
    pub mutated: String,
    pub classification: Classification,
    /// Verdict under TxEvMethLimit; viable mutants only.
    pub verdict: Option<VerdictRecord>,
    pub diff: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractReport {
    pub name: String,
    pub seed: u64,
    pub steps: usize,
    pub bytecode_len: usize,
    pub coverage: Score,
    pub generation: GenerationStats,
    pub killed: usize,
    /// Score per condition set, absent without viable mutants.
    pub scores: BTreeMap<String, Option<Score>>,
    pub mutants: Vec<MutantRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub contracts: usize,
    pub attempts: usize,
    pub stillborn: usize,
    pub duplicate: usize,
    pub viable: usize,
    pub killed: usize,
    pub exhausted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub target: usize,
    pub cap: usize,
    pub contracts: Vec<ContractReport>,
    pub excluded: Vec<Exclusion>,
    pub totals: Totals,
    pub scores: BTreeMap<String, Option<Score>>,
    pub curves: BTreeMap<String, Vec<CurvePoint<Score>>>,
    pub contingency: Contingency,
    /// Rank correlation of bytecode length and TxEvMethLimit score.
    pub kendall_tau: Option<Score>,
}

impl CampaignReport {
    pub fn is_empty(&self) -> bool {
        self.contracts.is_empty()
    }
}

/// A contract ready for evaluation.
struct Prepared {
    name: String,
    seed: u64,
    steps: usize,
    bytecode_len: usize,
    coverage: Score,
    original: crate::lang::SourceUnit,
    baseline: Baseline,
    mutants: Vec<Mutant>,
    stats: GenerationStats,
}

fn prepare(entry: &CorpusEntry, cfg: &CampaignConfig) -> Result<Prepared, String> {
    let text = fs::read_to_string(&entry.source).map_err(|e| format!("cannot read source: {e}"))?;
    let file = entry.source.file_name().and_then(|f| f.to_str()).unwrap_or(&entry.name).to_string();
    let unit = load(&file, &text).map_err(|d| {
        let first = d.first().map(|d| d.to_string()).unwrap_or_default();
        format!("does not check: {first}")
    })?;
    let test_text = fs::read_to_string(&entry.test).map_err(|e| format!("no replay test: {e}"))?;
    let test = ReplayTest::from_json(&test_text).map_err(|e| e.to_string())?;
    let code = Arc::new(compile(&unit).map_err(|e| e.to_string())?);
    let baseline = Baseline::new(code.clone(), &test).map_err(|e| format!("original replay failed: {e}"))?;
    let coverage = coverage(&baseline.trace.executed(), &code).map_err(|e| e.to_string())?;
    let seed = contract_seed(cfg.generation.seed, &entry.name);
    let gen = GenerationConfig { seed, ..cfg.generation };
    let (mutants, stats) = generate(&unit, &gen).map_err(|e| e.to_string())?;
    Ok(Prepared {
        name: entry.name.clone(),
        seed,
        steps: test.len(),
        bytecode_len: code.len(),
        coverage,
        original: unit.unit,
        baseline,
        mutants,
        stats,
    })
}

fn key(c: Conditions) -> String {
    c.to_string()
}

/// Condition sets in report order, always including TxEvMethLimit.
fn reported_sets(cfg: &CampaignConfig) -> Vec<Conditions> {
    let mut sets = cfg.condition_sets.clone();
    if !sets.contains(&Conditions::ALL) {
        sets.push(Conditions::ALL);
    }
    sets
}

/// Run every contract of the corpus: generate, replay, judge, aggregate.
/// The report depends only on `cfg` minus `workers`.
pub fn run_corpus(cfg: &CampaignConfig) -> Result<CampaignReport, CampaignError> {
    cfg.validate()?;
    let entries = scan_corpus(&cfg.corpus)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CampaignError::Pool(e.to_string()))?;

    let prepared: Vec<Result<Prepared, String>> = pool.install(|| entries.par_iter().map(|e| prepare(e, cfg)).collect());
    let mut contracts = Vec::new();
    let mut excluded = Vec::new();
    for (entry, p) in entries.iter().zip(prepared) {
        match p {
            Ok(p) => contracts.push(p),
            Err(reason) => excluded.push(Exclusion { name: entry.name.clone(), reason }),
        }
    }

    // One work unit per (contract, viable mutant), merged back in order.
    let units: Vec<(usize, usize)> = contracts
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| {
            c.mutants
                .iter()
                .enumerate()
                .filter(|(_, m)| m.classification == Classification::Viable)
                .map(move |(mi, _)| (ci, mi))
        })
        .collect();
    let results: Vec<Firings> = pool.install(|| {
        units
            .par_iter()
            .map(|&(ci, mi)| {
                let c = &contracts[ci];
                let code = c.mutants[mi].bytecode.as_ref().expect("viable mutants carry bytecode");
                let trace = c.baseline.run_mutant(code);
                firings(&c.baseline.trace, &trace, &c.baseline.limits).expect("same plan, same length")
            })
            .collect()
    });
    let mut per_mutant: BTreeMap<(usize, usize), Firings> = BTreeMap::new();
    for (u, f) in units.iter().zip(results) {
        per_mutant.insert(*u, f);
    }

    let sets = reported_sets(cfg);
    let mut reports = Vec::new();
    let mut all_firings = Vec::new();
    let mut table_input = Vec::new();
    let mut totals = Totals::default();
    for (ci, c) in contracts.iter().enumerate() {
        let mut records = Vec::new();
        let mut fs_here = Vec::new();
        for (mi, m) in c.mutants.iter().enumerate() {
            let f = per_mutant.get(&(ci, mi)).copied();
            let verdict = f.map(|f| f.verdict(Conditions::ALL));
            if let Some(f) = f {
                fs_here.push(f);
                table_input.push((m.operator, verdict.is_some_and(|v| v.killed)));
            }
            records.push(MutantRecord {
                id: m.id,
                operator: m.operator,
                line: m.line(),
                original: m.original.clone(),
                mutated: m.mutated.clone(),
                classification: m.classification,
                verdict: verdict.map(VerdictRecord::from),
                diff: m.diff_text(&c.original),
            });
        }
        let killed = fs_here.iter().filter(|f| f.verdict(Conditions::ALL).killed).count();
        let scores = sets.iter().map(|s| (key(*s), score_for(&fs_here, *s))).collect();
        totals.contracts += 1;
        totals.attempts += c.stats.attempts;
        totals.stillborn += c.stats.stillborn;
        totals.duplicate += c.stats.duplicate;
        totals.viable += c.stats.viable;
        totals.killed += killed;
        totals.exhausted += usize::from(c.stats.exhausted);
        all_firings.extend(fs_here);
        reports.push(ContractReport {
            name: c.name.clone(),
            seed: c.seed,
            steps: c.steps,
            bytecode_len: c.bytecode_len,
            coverage: c.coverage,
            generation: c.stats,
            killed,
            scores,
            mutants: records,
        });
    }

    let scores = sets.iter().map(|s| (key(*s), score_for(&all_firings, *s))).collect();
    let curves = sets.iter().map(|s| (key(*s), score_curve(&all_firings, &cfg.prefixes, *s))).collect();
    let (xs, ys): (Vec<Score>, Vec<Score>) = reports
        .iter()
        .filter_map(|r| r.scores.get(&key(Conditions::ALL)).copied().flatten().map(|s| (r.bytecode_len as Score, s)))
        .unzip();
    Ok(CampaignReport {
        seed: cfg.generation.seed,
        target: cfg.generation.target,
        cap: cfg.generation.cap,
        contracts: reports,
        excluded,
        totals,
        scores,
        curves,
        contingency: contingency_table(&table_input),
        kendall_tau: kendall_tau(&xs, &ys),
    })
}

fn score_for(fs: &[Firings], c: Conditions) -> Option<Score> {
    crate::harness::mutation_score(fs.iter().filter(|f| f.verdict(c).killed).count(), fs.len())
}
