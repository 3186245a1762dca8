//! `lexsurvey`: run the survey-scoring pipeline stage by stage.
//!
//! Every stage reads and writes inside the output directory (`--out`, default
//! `out/`), so a full run is
//!
//! ```text
//! lexsurvey synth && lexsurvey ingest && lexsurvey build-dict &&
//! lexsurvey score && lexsurvey fill --explain && lexsurvey baseline && lexsurvey eval
//! ```

mod artifacts;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use lexsurvey::config::RunConfig;
use lexsurvey::scoring::AlphaMode;

use commands::Ctx;

#[derive(Parser)]
#[command(
    name = "lexsurvey",
    version,
    about = "Survey-aligned lexicon scoring of weekly social-media text"
)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed for splits, synthetic cohorts and model training.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (created if absent).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic cohort (posts.jsonl, labels.csv).
    Synth(SynthArgs),
    /// Parse a post stream, bucket weeks, filter users, write the corpus.
    Ingest(IngestArgs),
    /// Learn the per-question dictionary from the training split.
    BuildDict(BuildDictArgs),
    /// Compute per-question alpha scores for every user-week.
    Score(ScoreArgs),
    /// Fill the three surveys and assign an intensity level per user-week.
    Fill(FillArgs),
    /// Train and apply the language-model baseline.
    Baseline(LexiconArgs),
    /// Split, learning-curve and weekly evaluation of both pipelines.
    Eval(LexiconArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    weeks: Option<usize>,
    #[arg(long)]
    noise_rate: Option<f64>,
    /// Carry each user's signal only in their latest week.
    #[arg(long)]
    week_local_signal: bool,
}

#[derive(Args)]
struct IngestArgs {
    /// Line-delimited JSON posts (default: <out>/posts.jsonl).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Labels CSV (default: <out>/labels.csv when present).
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    min_tweets: Option<usize>,
    #[arg(long)]
    min_english: Option<f64>,
}

#[derive(Args)]
struct BuildDictArgs {
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    min_df: Option<usize>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Dictionary file (default: <out>/dictionary.dic).
    #[arg(long)]
    dict: Option<PathBuf>,
    #[arg(long)]
    mode: Option<AlphaMode>,
}

#[derive(Args)]
struct FillArgs {
    #[command(flatten)]
    score: ScoreArgs,
    /// Write a clinician-readable report per user-week under <out>/reports.
    #[arg(long)]
    explain: bool,
    /// Map alpha scores to answers linearly instead of fitting calibration.
    #[arg(long)]
    no_calibration: bool,
}

#[derive(Args)]
struct LexiconArgs {
    /// Category lexicon file (default: bundled lists).
    #[arg(long)]
    lexicons: Option<PathBuf>,
}

fn context(cli: &Cli) -> Result<Ctx> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Synth(a) => {
            cfg.synth.n_users = a.users.unwrap_or(cfg.synth.n_users);
            cfg.synth.weeks = a.weeks.unwrap_or(cfg.synth.weeks);
            cfg.synth.noise_rate = a.noise_rate.unwrap_or(cfg.synth.noise_rate);
            cfg.synth.week_local_signal |= a.week_local_signal;
        }
        Command::Ingest(a) => {
            cfg.ingest.min_tweets = a.min_tweets.unwrap_or(cfg.ingest.min_tweets);
            cfg.ingest.min_english = a.min_english.unwrap_or(cfg.ingest.min_english);
        }
        Command::BuildDict(a) => {
            cfg.builder.top_k = a.top_k.unwrap_or(cfg.builder.top_k);
            cfg.builder.min_df = a.min_df.unwrap_or(cfg.builder.min_df);
        }
        Command::Score(a) => cfg.scoring.mode = a.mode.unwrap_or(cfg.scoring.mode),
        Command::Fill(a) => {
            cfg.scoring.mode = a.score.mode.unwrap_or(cfg.scoring.mode);
            cfg.scoring.calibration &= !a.no_calibration;
        }
        Command::Baseline(a) | Command::Eval(a) => {
            if a.lexicons.is_some() {
                cfg.paths.lexicons = a.lexicons.clone();
            }
        }
    }
    cfg.validate()?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.paths.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out)
        .map_err(|e| anyhow::anyhow!("creating {}: {e}", out.display()))?;
    Ok(Ctx { cfg, out })
}

fn run(cli: Cli) -> Result<()> {
    let ctx = context(&cli)?;
    match cli.command {
        Command::Synth(_) => commands::synth(&ctx),
        Command::Ingest(a) => commands::ingest(&ctx, a.input, a.labels),
        Command::BuildDict(_) => commands::build_dict(&ctx),
        Command::Score(a) => commands::score(&ctx, a.dict.as_deref()),
        Command::Fill(a) => commands::fill(&ctx, a.score.dict.as_deref(), a.explain),
        Command::Baseline(_) => commands::baseline(&ctx),
        Command::Eval(_) => commands::eval(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
