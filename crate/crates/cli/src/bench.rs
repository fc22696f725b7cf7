//! The benchmark matrix: every corpus entry under exact, refute and
//! refute with big chunks.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use nzf_core::corpus::{benchmarks, Benchmark};
use nzf_core::model::parse_model;
use nzf_core::{check, EvalConfig, Outcome};
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Exact,
    Refute,
    RefuteChunks,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Exact, Variant::Refute, Variant::RefuteChunks];

    fn name(self) -> &'static str {
        match self {
            Variant::Exact => "exact",
            Variant::Refute => "refute",
            Variant::RefuteChunks => "refute+chunks",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub benchmark: String,
    pub variant: Variant,
    pub verdict: String,
    pub wall_ms: f64,
    pub peak_zones: usize,
    /// Level at which the refuting run concluded; `None` for exact runs
    /// and for refute runs that never concluded.
    pub level: Option<usize>,
}

/// Loads `<stem>.ta` / `<stem>.tctl` pairs from a directory, sorted by stem.
pub fn load_corpus(dir: &Path) -> Result<Vec<Benchmark>, CliError> {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| CliError::Io(p.display().to_string(), e));
    let mut stems: Vec<String> = fs::read_dir(dir)
        .map_err(|e| CliError::Io(dir.display().to_string(), e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "tctl"))
        .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    stems.sort();
    stems
        .into_iter()
        .map(|name| {
            let model = dir.join(format!("{name}.ta"));
            let automaton = parse_model(&read(&model)?).map_err(|e| CliError::Parse(model.display().to_string(), e))?;
            let property = read(&dir.join(format!("{name}.tctl")))?.trim().to_string();
            Ok(Benchmark { name, automaton, property })
        })
        .collect()
}

pub fn shipped(filter: Option<&str>) -> Vec<Benchmark> {
    select(benchmarks(), filter)
}

pub fn select(all: Vec<Benchmark>, filter: Option<&str>) -> Vec<Benchmark> {
    all.into_iter().filter(|b| filter.is_none_or(|f| b.name.contains(f))).collect()
}

fn run_cell(b: &Benchmark, variant: Variant, max_level: usize) -> Result<Row, CliError> {
    let f = b.formula().map_err(|e| CliError::Parse(b.name.clone(), e))?;
    let configs: Vec<(Option<usize>, EvalConfig)> = match variant {
        Variant::Exact => vec![(None, EvalConfig::exact())],
        Variant::Refute | Variant::RefuteChunks => (0..=max_level)
            .map(|l| (Some(l), EvalConfig::refute(l).with_big_chunks(variant == Variant::RefuteChunks)))
            .collect(),
    };
    let mut wall = Duration::ZERO;
    let mut peak = 0;
    let mut last = Outcome::Unknown;
    let mut level = None;
    for (l, cfg) in configs {
        let t = Instant::now();
        let v = check(&b.automaton, &f, cfg).map_err(|e| CliError::Check(e.to_string()))?;
        wall += t.elapsed();
        peak = peak.max(v.stats.peak_zones);
        last = v.outcome;
        if last != Outcome::Unknown {
            level = l;
            break;
        }
    }
    Ok(Row {
        benchmark: b.name.clone(),
        variant,
        verdict: last.to_string(),
        wall_ms: wall.as_secs_f64() * 1e3,
        peak_zones: peak,
        level,
    })
}

/// Runs every (benchmark, variant) cell. With `jobs > 1` and the
/// `parallel` feature, cells run on a dedicated pool of that size.
pub fn run(corpus: &[Benchmark], max_level: usize, jobs: usize) -> Result<Vec<Row>, CliError> {
    let cells: Vec<(&Benchmark, Variant)> =
        corpus.iter().flat_map(|b| Variant::ALL.into_iter().map(move |v| (b, v))).collect();
    let go = |&(b, v): &(&Benchmark, Variant)| run_cell(b, v, max_level);
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Check(e.to_string()))?;
        return pool.install(|| cells.par_iter().map(go).collect());
    }
    let _ = jobs;
    cells.iter().map(go).collect()
}

/// Benchmarks where a refute run concluded with a verdict other than the
/// exact one.
pub fn disagreements(rows: &[Row]) -> Vec<String> {
    rows.iter()
        .filter(|r| r.variant != Variant::Exact && r.level.is_some())
        .filter(|r| {
            rows.iter()
                .find(|e| e.benchmark == r.benchmark && e.variant == Variant::Exact)
                .is_some_and(|e| e.verdict != r.verdict)
        })
        .map(|r| format!("{} ({})", r.benchmark, r.variant.name()))
        .collect()
}

pub fn table(rows: &[Row]) -> String {
    let mut out = format!("{:<14} {:<14} {:<10} {:>11} {:>10} {:>6}\n", "benchmark", "mode", "verdict", "time(ms)", "zones", "level");
    for r in rows {
        let level = r.level.map_or("-".to_string(), |l| l.to_string());
        out.push_str(&format!(
            "{:<14} {:<14} {:<10} {:>11.1} {:>10} {:>6}\n",
            r.benchmark,
            r.variant.name(),
            r.verdict,
            r.wall_ms,
            r.peak_zones,
            level
        ));
    }
    out
}
