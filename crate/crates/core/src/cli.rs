//! The `abcforge` command line.
//!
//! Exit codes: 0 success, 1 validation or metric failure, 2 usage error.
//! Diagnostics go to standard error; JSON / JSONL results go to standard
//! output or to the `--out` path.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::abc::{split_tunes, validate};
use crate::dataset::{
    build_dataset, emit_dpo, load_filter_config, read_sft, DatasetRecord, RunConfig, Split,
    DEFAULT_SPLIT_THRESHOLD,
};
use crate::degrade::{degrade_abc, record_seed, DegradationConfig};
use crate::metrics::{fmd, perplexity, read_loglik_jsonl, EmbeddingSet, LogLikRecord};
use crate::stats::{corpus_stats, CorpusStats, StatsTable, ROW_NAMES};

pub const MANIFEST_NAME: &str = "run_manifest.json";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "abcforge",
    version,
    about = "Build ABC instruction-tuning datasets and score symbolic-music outputs"
)]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    #[serde(skip)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Validate every tune of an ABC file and print a JSON report
    Validate(ValidateArgs),
    /// Corpus statistics for SFT JSONL or ABC files
    Stats(StatsArgs),
    /// Degrade every tune of an ABC file (key change, pitch swap, bar truncation)
    Degrade(DegradeArgs),
    /// Ingest, filter and split sources, then write SFT, DPO and sidecar files
    BuildDataset(BuildArgs),
    /// Turn an SFT JSONL file into DPO preference pairs
    Pair(PairArgs),
    /// Fréchet Music Distance between two embedding files
    Fmd(FmdArgs),
    /// Corpus perplexity from a log-likelihood JSONL file
    Ppl(PplArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    /// ABC file (one or more tunes)
    pub input: PathBuf,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatsFormat {
    Json,
    Table,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    /// SFT JSONL files (`.jsonl`) or ABC files
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Report short and long splits as separate columns
    #[arg(long)]
    pub by_split: bool,
    /// JSON object or aligned plain-text table
    #[arg(long, value_enum, default_value_t = StatsFormat::Json)]
    pub format: StatsFormat,
    /// Split threshold in characters for ABC inputs
    #[arg(long, default_value_t = DEFAULT_SPLIT_THRESHOLD)]
    pub split_threshold: usize,
    /// Write the result here (plus a run_manifest.json beside it) instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Degradation parameters; unset flags fall back to the run config, then to defaults.
#[derive(Debug, Args, Serialize)]
pub struct DegradeFlags {
    /// Global seed (required: output is a pure function of input and seed)
    #[arg(long)]
    pub seed: u64,
    /// Per-note swap probability [default: 0.1]
    #[arg(long = "p")]
    pub p: Option<f64>,
    /// Maximum number of music lines removed [default: 4]
    #[arg(long = "b-max")]
    pub b_max: Option<usize>,
    /// Replacement key [default: D#]
    #[arg(long)]
    pub alt_key: Option<String>,
    /// Key used when a tune is already in the replacement key [default: Eb]
    #[arg(long)]
    pub fallback_key: Option<String>,
}

impl DegradeFlags {
    fn apply(&self, base: DegradationConfig) -> DegradationConfig {
        DegradationConfig {
            seed: self.seed,
            swap_probability: self.p.unwrap_or(base.swap_probability),
            max_removable_bars: self.b_max.unwrap_or(base.max_removable_bars),
            alt_key: self.alt_key.clone().unwrap_or(base.alt_key),
            fallback_key: self.fallback_key.clone().unwrap_or(base.fallback_key),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DegradeArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub degradation: DegradeFlags,
    /// Worker threads (output order does not depend on it)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the result here (plus a run_manifest.json beside it) instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    /// Run config (TOML) listing sources and, optionally, filter settings
    #[arg(long)]
    pub mapping: PathBuf,
    /// Filter config (TOML); overrides the run config's [filter] table
    #[arg(long)]
    pub filter_config: Option<PathBuf>,
    #[command(flatten)]
    pub degradation: DegradeFlags,
    /// Short/long boundary in target characters [default: 500]
    #[arg(long)]
    pub split_threshold: Option<usize>,
    /// Worker threads (output does not depend on it)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output prefix: writes <out>.sft.jsonl, <out>.dpo.jsonl, <out>.filtered.jsonl, <out>.rejected.jsonl
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    /// SFT JSONL file
    pub input: PathBuf,
    #[command(flatten)]
    pub degradation: DegradeFlags,
    /// Worker threads (output does not depend on it)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// DPO JSONL output
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FmdArgs {
    /// Reference embeddings
    pub reference: PathBuf,
    /// Candidate embeddings
    pub candidate: PathBuf,
    /// Write the result here (plus a run_manifest.json beside it) instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PplArgs {
    /// JSONL with `id` and `token_logprobs` (natural log)
    pub input: PathBuf,
    /// Write the result here (plus a run_manifest.json beside it) instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Errors that map to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

/// A handled failure whose diagnostics were already printed.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Reported(String);

/// Parse `argv` (including the program name) and run; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();

    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            2
        }
        Err(e) if e.is::<Reported>() => {
            eprintln!("{e}");
            1
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Validate(a) => cmd_validate(cli, a),
        Command::Stats(a) => cmd_stats(cli, a),
        Command::Degrade(a) => cmd_degrade(cli, a),
        Command::BuildDataset(a) => cmd_build(cli, a),
        Command::Pair(a) => cmd_pair(cli, a),
        Command::Fmd(a) => cmd_fmd(cli, a),
        Command::Ppl(a) => cmd_ppl(cli, a),
    }
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn ensure_distinct(out: Option<&Path>, inputs: &[&Path]) -> Result<()> {
    if let Some(out) = out {
        if let Some(input) = inputs.iter().find(|i| same_file(out, i)) {
            return Err(
                UsageError(format!("output path {} is also an input", input.display())).into(),
            );
        }
    }
    Ok(())
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(UsageError("--jobs must be at least 1".into()).into());
        }
        builder = builder.num_threads(n);
    }
    Ok(builder.build().context("starting worker pool")?.install(f))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

/// Writes to `out` (and a manifest beside it) or to standard output.
fn emit(cli: &Cli, out: Option<&Path>, body: &str, extra: serde_json::Value) -> Result<()> {
    match out {
        Some(path) => {
            ensure_parent(path)?;
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            write_manifest(cli, path, extra)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn write_manifest(cli: &Cli, output: &Path, extra: serde_json::Value) -> Result<()> {
    let dir = output
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let manifest = json!({
        "tool": "abcforge",
        "version": env!("CARGO_PKG_VERSION"),
        "invocation": &cli.command,
        "run": extra,
    });
    let path = dir.join(MANIFEST_NAME);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn json_line(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    Ok(s)
}

fn cmd_validate(cli: &Cli, a: &ValidateArgs) -> Result<()> {
    ensure_distinct(a.out.as_deref(), &[&a.input])?;
    let text = read_text(&a.input)?;
    let tunes: Vec<_> = split_tunes(&text)
        .iter()
        .enumerate()
        .map(|(index, t)| {
            let report = validate(t);
            json!({ "index": index, "is_valid": report.is_valid, "issues": report.issues })
        })
        .collect();
    let invalid = tunes.iter().filter(|t| t["is_valid"] == false).count();
    let report = json!({
        "file": a.input,
        "tunes": tunes.len(),
        "valid": tunes.len() - invalid,
        "invalid": invalid,
        "reports": tunes,
    });
    emit(cli, a.out.as_deref(), &json_line(&report)?, json!({}))?;
    if tunes.is_empty() || invalid > 0 {
        return Err(Reported(format!(
            "{}: {invalid} of {} tunes invalid",
            a.input.display(),
            tunes.len()
        ))
        .into());
    }
    Ok(())
}

fn load_records(path: &Path, split_threshold: usize) -> Result<Vec<DatasetRecord>> {
    let is_jsonl = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl" | "ndjson" | "json")
    );
    if is_jsonl {
        return read_sft(path).map_err(Into::into);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("abc");
    Ok(split_tunes(&read_text(path)?)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let mut r = DatasetRecord::new(format!("{stem}-{i:06}"), stem, "", "", t);
            r.resplit(split_threshold);
            r
        })
        .collect())
}

fn cmd_stats(cli: &Cli, a: &StatsArgs) -> Result<()> {
    let inputs: Vec<&Path> = a.inputs.iter().map(PathBuf::as_path).collect();
    ensure_distinct(a.out.as_deref(), &inputs)?;
    let mut records = Vec::new();
    for path in &a.inputs {
        records.extend(load_records(path, a.split_threshold)?);
    }
    let columns: Vec<(String, CorpusStats)> = if a.by_split {
        [Split::Short, Split::Long]
            .into_iter()
            .map(|s| {
                let label = match s {
                    Split::Short => "Short",
                    Split::Long => "Long",
                };
                (
                    label.to_string(),
                    corpus_stats(records.iter().filter(|r| r.split == s)),
                )
            })
            .collect()
    } else {
        vec![("All".to_string(), corpus_stats(&records))]
    };
    let body = match a.format {
        StatsFormat::Table => {
            StatsTable(columns.iter().map(|(l, s)| (l.clone(), s)).collect()).to_string()
        }
        StatsFormat::Json => json_line(&stats_json(&columns))?,
    };
    emit(cli, a.out.as_deref(), &body, json!({}))
}

/// `{"table": {row: {column: value}}, "<column>": {...full stats...}}` with
/// lowercase column keys.
fn stats_json(columns: &[(String, CorpusStats)]) -> Value {
    let mut table = Map::new();
    for (i, name) in ROW_NAMES.iter().enumerate() {
        let row: Map<String, Value> = columns
            .iter()
            .map(|(label, s)| (label.to_lowercase(), json!(s.row_values()[i])))
            .collect();
        table.insert(name.to_string(), Value::Object(row));
    }
    let mut out = Map::new();
    out.insert("table".into(), Value::Object(table));
    for (label, s) in columns {
        out.insert(label.to_lowercase(), json!(s));
    }
    Value::Object(out)
}

fn cmd_degrade(cli: &Cli, a: &DegradeArgs) -> Result<()> {
    ensure_distinct(a.out.as_deref(), &[&a.input])?;
    let cfg = a.degradation.apply(DegradationConfig::default());
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    let tunes = split_tunes(&read_text(&a.input)?);
    let results: Vec<_> = with_jobs(a.jobs, || {
        tunes
            .par_iter()
            .enumerate()
            .map(|(i, t)| degrade_abc(t, &cfg.with_seed(record_seed(cfg.seed, i as u64))))
            .collect()
    })?;
    let mut body = String::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(text) => {
                if !body.is_empty() {
                    body.push('\n');
                }
                body.push_str(&text);
                if !body.ends_with('\n') {
                    body.push('\n');
                }
            }
            Err(e) => failures.push(format!("tune {i}: {e}")),
        }
    }
    if !failures.is_empty() {
        return Err(Reported(failures.join("\n")).into());
    }
    emit(
        cli,
        a.out.as_deref(),
        &body,
        json!({ "degradation": cfg, "tunes": tunes.len() }),
    )
}

fn cmd_build(cli: &Cli, a: &BuildArgs) -> Result<()> {
    let mut cfg = RunConfig::load(&a.mapping)?;
    if let Some(path) = &a.filter_config {
        cfg.filter = load_filter_config(path)?;
    }
    if let Some(t) = a.split_threshold {
        cfg.split_threshold = t;
    }
    cfg.degradation = a.degradation.apply(cfg.degradation);
    cfg.degradation
        .validate()
        .map_err(|e| UsageError(e.to_string()))?;
    for src in &cfg.sources {
        let outputs = crate::dataset::BuildOutputs::for_prefix(&a.out, true);
        let produced = [&outputs.sft, &outputs.filtered, &outputs.rejected];
        if produced.iter().any(|p| same_file(p, &src.path))
            || outputs
                .dpo
                .as_deref()
                .is_some_and(|p| same_file(p, &src.path))
        {
            return Err(UsageError(format!(
                "output would overwrite input {}",
                src.path.display()
            ))
            .into());
        }
    }
    let summary = with_jobs(a.jobs, || build_dataset(&cfg, &a.out, true))??;
    log::info!(
        "ingested {} -> kept {}, filtered {}, rejected {}",
        summary.ingested,
        summary.kept,
        summary.filtered,
        summary.rejected
    );
    write_manifest(
        cli,
        &summary.outputs.sft,
        json!({ "config": cfg, "summary": summary }),
    )?;
    print!("{}", json_line(&summary)?);
    Ok(())
}

fn cmd_pair(cli: &Cli, a: &PairArgs) -> Result<()> {
    ensure_distinct(Some(&a.out), &[&a.input])?;
    let cfg = a.degradation.apply(DegradationConfig::default());
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    let records = read_sft(&a.input)?;
    ensure_parent(&a.out)?;
    let summary = with_jobs(a.jobs, || emit_dpo(&records, &cfg, &a.out))??;
    let report = json!({
        "records": records.len(),
        "written": summary.written,
        "skipped": summary.skipped.iter().map(|(id, why)| json!({"id": id, "reason": why})).collect::<Vec<_>>(),
    });
    write_manifest(
        cli,
        &a.out,
        json!({ "degradation": cfg, "summary": &report }),
    )?;
    print!("{}", json_line(&report)?);
    Ok(())
}

fn cmd_fmd(cli: &Cli, a: &FmdArgs) -> Result<()> {
    ensure_distinct(a.out.as_deref(), &[&a.reference, &a.candidate])?;
    let reference = EmbeddingSet::read(&a.reference)?;
    let candidate = EmbeddingSet::read(&a.candidate)?;
    let d2 = fmd(&reference, &candidate)?;
    let report = json!({
        "fmd": d2,
        "dim": reference.dim(),
        "reference_count": reference.len(),
        "candidate_count": candidate.len(),
    });
    emit(cli, a.out.as_deref(), &json_line(&report)?, json!({}))
}

fn cmd_ppl(cli: &Cli, a: &PplArgs) -> Result<()> {
    ensure_distinct(a.out.as_deref(), &[&a.input])?;
    let records: Vec<LogLikRecord> = read_loglik_jsonl(&a.input)?;
    let ppl = perplexity(&records)?;
    let tokens: usize = records.iter().map(LogLikRecord::token_count).sum();
    let report = json!({ "perplexity": ppl, "records": records.len(), "tokens": tokens });
    emit(cli, a.out.as_deref(), &json_line(&report)?, json!({}))
}
