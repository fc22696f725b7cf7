mod bench;
mod compat;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use nzf_core::corpus::{benchmarks, pruning_instance};
use nzf_core::model::{parse_formula, parse_model, Formula, ParseError, TimedAutomaton};
use nzf_core::oracle::{OracleError, RegionGraph};
use nzf_core::{check, Context, EvalConfig, Outcome, StateSet, Stats};
use serde::Serialize;
use thiserror::Error;

const EXIT_USAGE: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("{0}:{1}")]
    Parse(String, #[source] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Check(String),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
}

#[derive(Parser, Debug)]
#[command(name = "nzf-check", version, about = "TCTL model checker for timed automata")]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the benchmark matrix (exact, refute, refute with big chunks).
    Bench(BenchArgs),
    /// Write the shipped benchmark models and properties to a directory.
    GenCorpus { dir: PathBuf },
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").args(["exact", "refute", "prove", "oracle"])))]
struct RunArgs {
    /// Exact evaluation (the default).
    #[arg(long)]
    exact: bool,
    /// Under-approximate the violating states; only REFUTED is conclusive.
    #[arg(long)]
    refute: bool,
    /// Over-approximate the violating states; only SATISFIED is conclusive.
    #[arg(long)]
    prove: bool,
    /// Decide on the region graph instead of zones. Small models only.
    #[arg(long)]
    oracle: bool,
    /// Under-approximation level for non-Zeno fair cycles.
    #[arg(long, default_value_t = 0)]
    level: usize,
    /// Remove whole fair zones per iteration instead of their entry states.
    #[arg(long)]
    big_chunks: bool,
    /// Restrict path quantifiers to non-Zeno runs in every mode.
    #[arg(long)]
    non_zeno: bool,
    /// Print a single-line JSON record instead of the text report.
    #[arg(long)]
    json: bool,
    /// Read the formula from a file.
    #[arg(long, value_name = "FILE")]
    formula_file: Option<PathBuf>,
    #[arg(required = true)]
    model: Option<PathBuf>,
    formula: Option<String>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Worker threads for independent cells.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Highest level tried by the refute runs.
    #[arg(long, default_value_t = 2)]
    max_level: usize,
    /// Only benchmarks whose name contains this string.
    #[arg(long)]
    filter: Option<String>,
    /// Load `<name>.ta`/`<name>.tctl` pairs from a directory instead of
    /// the built-in generators.
    #[arg(long, value_name = "DIR")]
    corpus: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Serialize, Debug)]
struct Report {
    verdict: String,
    level_used: usize,
    saturated: bool,
    zones_enumerated: usize,
    dfs_nodes: usize,
    fixpoint_iterations: usize,
    wall_ms: f64,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn load(args: &RunArgs) -> Result<(TimedAutomaton, Formula, String), CliError> {
    let model = args.model.as_deref().ok_or_else(|| CliError::Usage("missing model file".into()))?;
    let a = parse_model(&read(model)?).map_err(|e| CliError::Parse(model.display().to_string(), e))?;
    let (src, origin) = match (&args.formula, &args.formula_file) {
        (Some(f), None) => (f.clone(), "formula".to_string()),
        (None, Some(p)) => (read(p)?, p.display().to_string()),
        (Some(_), Some(_)) => return Err(CliError::Usage("give the formula inline or with --formula-file, not both".into())),
        (None, None) => return Err(CliError::Usage("missing formula".into())),
    };
    let src = src.trim().to_string();
    let f = parse_formula(&src, &a).map_err(|e| CliError::Parse(origin, e))?;
    Ok((a, f, src))
}

fn config(args: &RunArgs) -> EvalConfig {
    let base = if args.refute {
        EvalConfig::refute(args.level)
    } else if args.prove {
        EvalConfig::prove()
    } else {
        EvalConfig::exact()
    };
    EvalConfig { level: args.level, ..base }.with_big_chunks(args.big_chunks).with_non_zeno(args.non_zeno)
}

/// Decides the property on the region graph. Only a verdict comes back,
/// with no witness and no counters.
fn oracle_check(a: &TimedAutomaton, f: &Formula) -> Result<Outcome, CliError> {
    let negated = Formula::not(f.clone());
    let ctx = Context::new(a, &negated);
    let g = RegionGraph::build(&ctx)?;
    let init = StateSet::from_predicate(&ctx, &a.initial);
    let init_nodes = g.classify(&init).map_err(|m| CliError::Check(format!("initial states split a region: {m:?}")))?;
    let bad = g.eval(&negated);
    let hit = init_nodes.iter().zip(&bad).any(|(i, b)| *i && *b);
    Ok(if hit { Outcome::Refuted } else { Outcome::Satisfied })
}

fn exit_for(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Satisfied => 0,
        Outcome::Refuted => 1,
        Outcome::Unknown => 2,
    }
}

fn run(args: &RunArgs) -> Result<u8, CliError> {
    let (a, f, src) = load(args)?;
    let cfg = config(args);
    let t = Instant::now();
    let (outcome, witness, stats) = if args.oracle {
        (oracle_check(&a, &f)?, None, Stats::new())
    } else {
        let v = check(&a, &f, cfg).map_err(|e| CliError::Check(e.to_string()))?;
        (v.outcome, v.witness, v.stats)
    };
    let wall_ms = t.elapsed().as_secs_f64() * 1e3;
    if args.json {
        let r = Report {
            verdict: outcome.to_string(),
            level_used: stats.level_used,
            saturated: stats.saturated,
            zones_enumerated: stats.zones_enumerated,
            dfs_nodes: stats.dfs_nodes,
            fixpoint_iterations: stats.fixpoint_iterations,
            wall_ms,
        };
        emit(&format!("{}\n", serde_json::to_string(&r).expect("report serializes")));
        return Ok(exit_for(outcome));
    }
    let mut out = format!("verdict: {outcome}\nproperty: {src}\n");
    if args.oracle {
        out.push_str("mode: oracle\n");
    } else {
        let mode = match cfg.flag {
            -1 => "refute",
            1 => "prove",
            _ => "exact",
        };
        let _ = writeln!(
            out,
            "mode: {mode} (level {}, big chunks {}, non-zeno {})",
            cfg.level,
            on_off(cfg.big_chunks),
            on_off(cfg.non_zeno)
        );
        let _ = writeln!(out, "level used: {}", stats.level_used);
        let _ = writeln!(out, "saturated: {}", stats.saturated);
        let _ = writeln!(out, "zones enumerated: {}", stats.zones_enumerated);
        let _ = writeln!(out, "dfs nodes: {}", stats.dfs_nodes);
        let _ = writeln!(out, "fixpoint iterations: {}", stats.fixpoint_iterations);
        let _ = writeln!(out, "peak zones: {}", stats.peak_zones);
    }
    let _ = writeln!(out, "wall: {wall_ms:.1} ms");
    if let Some(w) = witness {
        out.push_str("violating initial states:\n");
        for line in w.lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    emit(&out);
    Ok(exit_for(outcome))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

fn run_bench(args: &BenchArgs) -> Result<u8, CliError> {
    let filter = args.filter.as_deref();
    let corpus = match &args.corpus {
        Some(dir) => bench::select(bench::load_corpus(dir)?, filter),
        None => bench::shipped(filter),
    };
    if corpus.is_empty() {
        return Err(CliError::Usage("no benchmarks selected".into()));
    }
    let rows = bench::run(&corpus, args.max_level, args.jobs.max(1))?;
    if args.json {
        emit(&format!("{}\n", serde_json::to_string(&rows).expect("rows serialize")));
    } else {
        emit(&bench::table(&rows));
    }
    let bad = bench::disagreements(&rows);
    if bad.is_empty() {
        Ok(0)
    } else {
        eprintln!("verdicts disagree with exact: {}", bad.join(", "));
        Ok(1)
    }
}

fn gen_corpus(dir: &Path) -> Result<u8, CliError> {
    let write = |name: String, body: String| {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| CliError::Io(p.display().to_string(), e))
    };
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    for b in benchmarks() {
        write(format!("{}.ta", b.name), b.automaton.to_source())?;
        write(format!("{}.tctl", b.name), format!("{}\n", b.property))?;
    }
    write("pruning.ta".into(), pruning_instance().to_source())?;
    Ok(0)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match compat::rewrite(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Some(Command::Bench(b)) => run_bench(b),
        Some(Command::GenCorpus { dir }) => gen_corpus(dir),
        None => run(&cli.run),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
