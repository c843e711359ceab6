//! `nonsense`: generate, ingest, verify, summarize and score datasets.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nonsense_core::io::{dataset_stats, ingest_real_corpus, read_documents, write_documents};
use nonsense_core::pipeline::{verify_dataset, Generator, RunConfig, TaskSelection};
use nonsense_core::rouge::{score_texts, Tokenization};
use nonsense_core::{
    DocPolicy, ElementaryKind, EnsembleConfig, KeywordScheme, MaskConfig, StepKind,
};

#[derive(Parser)]
#[command(
    name = "nonsense",
    version,
    about = "Synthetic summarization pretraining corpora"
)]
struct Cli {
    /// Keyword scheme file (TOML); defaults to the built-in scheme.
    #[arg(long, global = true, env = "NONSENSE_SCHEME")]
    scheme: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Split plain text into base documents for `gen --documents`.
    Ingest(IngestArgs),
    /// Replay every record's checks.
    Verify(VerifyArgs),
    /// Record counts, length percentiles and task histograms.
    Stats(StatsArgs),
    /// ROUGE-1/2/L of aligned candidate and reference lines.
    Rouge(RougeArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Denoising tasks over 512-token documents.
    Step(StepArgs),
    /// Elementary tasks, one kind or an ensemble of kinds.
    Tasks(TasksArgs),
}

#[derive(Args)]
struct CommonGen {
    /// Number of records to write.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// Master seed; every record is a function of (seed, task, index).
    #[arg(long)]
    seed: u64,
    /// Output dataset path (JSON lines).
    #[arg(long)]
    out: PathBuf,
    /// Vocabulary size (1..=17576).
    #[arg(long, default_value_t = 5000)]
    vocab_size: usize,
    /// Base documents written by `ingest`, used instead of nonsense text.
    #[arg(long)]
    documents: Option<PathBuf>,
    /// Regenerate and check every N-th record after writing (0 disables).
    #[arg(long, default_value_t = 100)]
    spot_check_every: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MaskMode {
    PerToken,
    Collapsed,
}

#[derive(Args)]
struct StepArgs {
    /// nsg, sr, sr-adjusted, mdg or mdg-adjusted.
    #[arg(long, value_parser = parse_step_kind)]
    kind: StepKind,
    #[command(flatten)]
    common: CommonGen,
    /// Fraction of document tokens masked by mdg tasks.
    #[arg(long, default_value_t = 0.15)]
    mask_fraction: f64,
    #[arg(long, default_value = "[MASK]")]
    mask_token: String,
    #[arg(long, value_enum, default_value_t = MaskMode::PerToken)]
    mask_mode: MaskMode,
}

#[derive(Clone)]
enum TaskChoice {
    Kind(ElementaryKind),
    Ensemble,
}

#[derive(Args)]
struct TasksArgs {
    /// An elementary task name (e.g. CopyFirstSentence) or `ensemble`.
    #[arg(long, value_parser = parse_task_choice)]
    kind: TaskChoice,
    #[command(flatten)]
    common: CommonGen,
    /// Tasks per ensemble instance.
    #[arg(long, default_value_t = 3)]
    tasks_per_instance: usize,
    /// Allow the same kind twice in one ensemble instance.
    #[arg(long)]
    with_replacement: bool,
    /// Comma-separated ensemble-eligible kinds (default: the 16 standard ones).
    #[arg(long, value_delimiter = ',', value_parser = parse_elementary_kind)]
    eligible: Vec<ElementaryKind>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Sentences,
    Tokens,
}

#[derive(Args)]
struct IngestArgs {
    /// Plain-text input: one paragraph per line or continuous text.
    #[arg(long)]
    input: PathBuf,
    /// Output document file, one document per line.
    #[arg(long)]
    out: PathBuf,
    /// Group by a random sentence count or by a token budget.
    #[arg(long, value_enum, default_value_t = PolicyArg::Sentences)]
    policy: PolicyArg,
    #[arg(long, default_value_t = 7)]
    min_sentences: usize,
    #[arg(long, default_value_t = 13)]
    max_sentences: usize,
    #[arg(long, default_value_t = 512)]
    budget: usize,
    /// Seed for per-document sentence counts.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    path: PathBuf,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Failures listed in the text report.
    #[arg(long, default_value_t = 10)]
    show: usize,
}

#[derive(Args)]
struct StatsArgs {
    path: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RougeArgs {
    /// One candidate summary per line.
    candidates: PathBuf,
    /// One reference summary per line, aligned with the candidates.
    references: PathBuf,
    #[arg(long)]
    json: bool,
    /// Include per-pair rows in the text table.
    #[arg(long)]
    per_pair: bool,
    /// Split on non-alphanumeric characters instead of whitespace.
    #[arg(long)]
    real_text: bool,
}

fn parse_step_kind(s: &str) -> Result<StepKind, String> {
    s.parse().map_err(|e: nonsense_core::Error| e.to_string())
}

fn parse_elementary_kind(s: &str) -> Result<ElementaryKind, String> {
    s.parse().map_err(|e: nonsense_core::Error| e.to_string())
}

fn parse_task_choice(s: &str) -> Result<TaskChoice, String> {
    if s.eq_ignore_ascii_case("ensemble") {
        Ok(TaskChoice::Ensemble)
    } else {
        parse_elementary_kind(s).map(TaskChoice::Kind)
    }
}

fn load_scheme(path: Option<&Path>) -> Result<KeywordScheme> {
    match path {
        None => Ok(KeywordScheme::default()),
        Some(p) => KeywordScheme::load(p).context("loading keyword scheme"),
    }
}

fn run_generation(config: RunConfig, common: &CommonGen) -> Result<()> {
    let generator = match &common.documents {
        None => Generator::new(config)?,
        Some(path) => {
            let docs = read_documents(path)
                .with_context(|| format!("reading documents from {}", path.display()))?;
            Generator::with_documents(config, docs)?
        }
    };
    let summary = generator
        .write(&common.out)
        .with_context(|| format!("writing {}", common.out.display()))?;
    eprintln!(
        "wrote {} records to {} in {:.2}s ({:.0} records/s), config digest {}",
        summary.records,
        common.out.display(),
        summary.elapsed.as_secs_f64(),
        summary.per_second(),
        summary.config_digest
    );
    if common.spot_check_every > 0 {
        let checked = generator.spot_check(common.spot_check_every)?;
        eprintln!("spot check: {checked} records verified");
    }
    Ok(())
}

fn gen_step(args: StepArgs, scheme: KeywordScheme) -> Result<()> {
    let mut config = RunConfig::new(
        args.common.seed,
        args.common.count,
        TaskSelection::Step { kind: args.kind },
    );
    config.vocab_size = args.common.vocab_size;
    config.scheme = scheme;
    config.mask = MaskConfig {
        mask_fraction: args.mask_fraction,
        mask_token: args.mask_token,
        per_token: matches!(args.mask_mode, MaskMode::PerToken),
    };
    run_generation(config, &args.common)
}

fn gen_tasks(args: TasksArgs, scheme: KeywordScheme) -> Result<()> {
    let task = match args.kind {
        TaskChoice::Kind(kind) => TaskSelection::Elementary { kind },
        TaskChoice::Ensemble => {
            let mut config = EnsembleConfig {
                tasks_per_instance: args.tasks_per_instance,
                replacement: args.with_replacement,
                ..EnsembleConfig::default()
            };
            if !args.eligible.is_empty() {
                config.eligible_kinds = args.eligible.into_iter().collect();
            }
            TaskSelection::Ensemble { config }
        }
    };
    let mut config = RunConfig::new(args.common.seed, args.common.count, task);
    config.vocab_size = args.common.vocab_size;
    config.scheme = scheme;
    run_generation(config, &args.common)
}

fn ingest(args: IngestArgs) -> Result<()> {
    let policy = match args.policy {
        PolicyArg::Sentences => DocPolicy::BySentences {
            min: args.min_sentences,
            max: args.max_sentences,
        },
        PolicyArg::Tokens => DocPolicy::ByTokens {
            budget: args.budget,
        },
    };
    let docs = ingest_real_corpus(&args.input, policy, args.seed)?;
    write_documents(&docs, &args.out)?;
    eprintln!("wrote {} documents to {}", docs.len(), args.out.display());
    Ok(())
}

/// Returns whether every record passed.
fn verify(args: VerifyArgs, scheme: &KeywordScheme) -> Result<bool> {
    let report = verify_dataset(&args.path, scheme)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!(
            "{}: {} records, {} passed, {} failed",
            args.path.display(),
            report.total,
            report.passed,
            report.failed()
        );
        for f in report.failures.iter().take(args.show) {
            let id = f.id.as_deref().unwrap_or("-");
            println!("  line {} ({id}): {}", f.line, f.message);
        }
        if report.failures.len() > args.show {
            println!("  ... {} more", report.failures.len() - args.show);
        }
    }
    Ok(report.ok())
}

fn stats(args: StatsArgs) -> Result<()> {
    let report = dataset_stats(&args.path)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn rouge(args: RougeArgs) -> Result<()> {
    let candidates = read_lines(&args.candidates)?;
    let references = read_lines(&args.references)?;
    if candidates.len() != references.len() {
        bail!(
            "{} has {} lines but {} has {}",
            args.candidates.display(),
            candidates.len(),
            args.references.display(),
            references.len()
        );
    }
    let tokenization = if args.real_text {
        Tokenization::RealText
    } else {
        Tokenization::Whitespace
    };
    let report = score_texts(&candidates, &references, tokenization)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.to_table(args.per_pair));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let scheme = || load_scheme(cli.scheme.as_deref());
    match cli.command {
        Command::Gen(GenCommand::Step(args)) => gen_step(args, scheme()?)?,
        Command::Gen(GenCommand::Tasks(args)) => gen_tasks(args, scheme()?)?,
        Command::Ingest(args) => ingest(args)?,
        Command::Verify(args) => return verify(args, &scheme()?),
        Command::Stats(args) => stats(args)?,
        Command::Rouge(args) => rouge(args)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
