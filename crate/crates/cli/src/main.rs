use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use mutforge::compiler::compile;
use mutforge::harness::{firings, replay, Baseline, Conditions, GasCaps, ReplayTest};
use mutforge::lang::{load, CheckedUnit};
use mutforge::mutation::{generate, mutants_to_json, Classification, GenerationConfig};
use mutforge::report::{render_report, run_corpus, CampaignConfig, Format};
use serde_json::json;

const SEED_VAR: &str = "MUTFORGE_SEED";

#[derive(Parser)]
#[command(name = "mutforge", version, about = "Mutation testing for MiniSol contracts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct GenArgs {
    /// Generation seed; MUTFORGE_SEED takes precedence when set.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Viable mutants to aim for.
    #[arg(long, default_value_t = 50)]
    target: usize,
    /// Maximum number of attempts.
    #[arg(long, default_value_t = 1000)]
    cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and classify mutants of a contract.
    Mutate {
        contract: PathBuf,
        #[command(flatten)]
        gen: GenArgs,
        /// Print each mutant as a diff instead of JSON.
        #[arg(long)]
        diff: bool,
    },
    /// Replay a test against the unmutated contract.
    Test {
        contract: PathBuf,
        test: PathBuf,
        /// Number of steps to replay (default: all).
        #[arg(long)]
        prefix: Option<usize>,
    },
    /// Generate mutants and judge them against a replay test.
    Score {
        contract: PathBuf,
        test: PathBuf,
        #[command(flatten)]
        gen: GenArgs,
        /// Kill conditions, e.g. `tx,ev,meth,limit`.
        #[arg(long, default_value = "tx,ev,meth,limit")]
        conditions: String,
    },
    /// Run a whole corpus directory and write a report.
    Report {
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "json")]
        format: String,
    },
}

enum Failure {
    Usage(String),
    Corpus(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn corpus(e: impl ToString) -> Failure {
    Failure::Corpus(e.to_string())
}

fn seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{SEED_VAR} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn gen_config(g: &GenArgs) -> Result<GenerationConfig, Failure> {
    let cfg = GenerationConfig { target: g.target, cap: g.cap, seed: seed(g.seed)? };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn load_contract(path: &Path) -> Result<CheckedUnit, Failure> {
    let text = fs::read_to_string(path).map_err(|e| corpus(format!("{}: {e}", path.display())))?;
    let file = path.file_name().and_then(|f| f.to_str()).unwrap_or("input.msol");
    load(file, &text).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(|d| format!("{file}:{d}")).collect();
        corpus(lines.join("\n"))
    })
}

fn load_test(path: &Path) -> Result<ReplayTest, Failure> {
    let text = fs::read_to_string(path).map_err(|e| corpus(format!("{}: {e}", path.display())))?;
    ReplayTest::from_json(&text).map_err(|e| corpus(format!("{}: {e}", path.display())))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json serializes"));
}

fn mutate(path: &Path, g: &GenArgs, diff: bool) -> Outcome {
    let cfg = gen_config(g)?;
    let unit = load_contract(path)?;
    let (mutants, stats) = generate(&unit, &cfg).map_err(corpus)?;
    if diff {
        for m in &mutants {
            println!("#{} {} line {} ({:?})", m.id, m.operator.label(), m.line(), m.classification);
            let d = m.diff_text(&unit.unit);
            if !d.is_empty() {
                println!("{d}");
            }
        }
        eprintln!(
            "{} attempts: {} stillborn, {} duplicate, {} viable{}",
            stats.attempts,
            stats.stillborn,
            stats.duplicate,
            stats.viable,
            if stats.exhausted { " (exhausted)" } else { "" }
        );
    } else {
        print_json(&json!({ "seed": cfg.seed, "stats": stats, "mutants": mutants_to_json(&mutants) }));
    }
    Ok(())
}

fn test(contract: &Path, test_path: &Path, prefix: Option<usize>) -> Outcome {
    let unit = load_contract(contract)?;
    let test = load_test(test_path)?;
    let code = Arc::new(compile(&unit).map_err(corpus)?);
    let base = Baseline::new(code.clone(), &test).map_err(corpus)?;
    let prefix = prefix.unwrap_or(test.len());
    let trace = replay(&code, &base.plan, prefix, &GasCaps::Unbounded).map_err(usage)?;
    let steps: Vec<serde_json::Value> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "index": i,
                "status": s.status,
                "gas_used": s.gas_used,
                "glr": base.limits[i],
                "events": s.events,
                "calls": s.calls,
            })
        })
        .collect();
    print_json(&json!({ "contract": code.contract, "fingerprint": code.fingerprint(), "steps": steps }));
    Ok(())
}

fn score(contract: &Path, test_path: &Path, g: &GenArgs, conditions: &str) -> Outcome {
    let conditions: Conditions = conditions.parse().map_err(usage)?;
    let cfg = gen_config(g)?;
    let unit = load_contract(contract)?;
    let test = load_test(test_path)?;
    let code = Arc::new(compile(&unit).map_err(corpus)?);
    let base = Baseline::new(code, &test).map_err(corpus)?;
    let (mutants, stats) = generate(&unit, &cfg).map_err(corpus)?;
    let mut verdicts = Vec::new();
    let mut killed = 0;
    for m in mutants.iter().filter(|m| m.classification == Classification::Viable) {
        let trace = base.run_mutant(m.bytecode.as_ref().expect("viable mutants carry bytecode"));
        let v = firings(&base.trace, &trace, &base.limits).map_err(corpus)?.verdict(conditions);
        killed += usize::from(v.killed);
        verdicts.push(v.to_json(m.id));
    }
    let score: Option<f64> = mutforge::harness::mutation_score(killed, verdicts.len());
    print_json(&json!({
        "seed": cfg.seed,
        "conditions": conditions.to_string(),
        "stats": stats,
        "killed": killed,
        "viable": verdicts.len(),
        "score": score,
        "verdicts": verdicts,
    }));
    Ok(())
}

fn report(dir: &Path, out: &Path, g: &GenArgs, workers: usize, format: &str) -> Outcome {
    let format: Format = format.parse().map_err(usage)?;
    let mut cfg = CampaignConfig::new(dir, seed(g.seed)?);
    cfg.generation.target = g.target;
    cfg.generation.cap = g.cap;
    cfg.workers = workers;
    cfg.validate().map_err(usage)?;
    let report = run_corpus(&cfg).map_err(corpus)?;
    if report.is_empty() && report.excluded.is_empty() {
        eprintln!("warning: no contracts found in {}", dir.display());
    }
    for e in &report.excluded {
        eprintln!("warning: excluded {}: {}", e.name, e.reason);
    }
    fs::create_dir_all(out).map_err(|e| usage(format!("{}: {e}", out.display())))?;
    let path = out.join(format!("report.{}", format.extension()));
    fs::write(&path, render_report(&report, format)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Mutate { contract, gen, diff } => mutate(contract, gen, *diff),
        Command::Test { contract, test: t, prefix } => test(contract, t, *prefix),
        Command::Score { contract, test: t, gen, conditions } => score(contract, t, gen, conditions),
        Command::Report { corpus: dir, out, gen, workers, format } => report(dir, out, gen, *workers, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Corpus(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
