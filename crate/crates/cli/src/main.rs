mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Word-level relative duration modelling: corpus preparation, training,
/// generation, evaluation and SSML output.
#[derive(Debug, Parser)]
#[command(name = "wordlen", version)]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Gan,
    Imle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter aligned clips by agreement and write the dataset file.
    Prepare {
        /// Alignment CSV or aligner output directory (overrides `paths.alignments`).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Train a model and write `checkpoint.pfck` and `loss.csv`.
    Train {
        #[arg(long, value_enum, default_value = "gan")]
        model: ModelChoice,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Epochs to run in this invocation (default: the configured total).
        #[arg(long)]
        epochs: Option<usize>,
        /// Continue from a checkpoint; `loss.csv` is appended to.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Sample relative lengths for one sentence and write CSV plus SSML.
    Generate {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// 0-based id or CREMA-D code.
        #[arg(long)]
        sentence: String,
        #[arg(long)]
        emotion: String,
        /// 0-based id or CREMA-D actor id.
        #[arg(long, default_value = "0")]
        speaker: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Score a checkpoint against the dataset.
    Evaluate {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Rate-of-speech ANOVA and Tukey tests by emotion, speaker and intensity.
    Stats {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Render SSML from given relative lengths or a `generated.csv`.
    Ssml {
        #[arg(long, required_unless_present = "input")]
        sentence: Option<String>,
        /// Comma-separated relative lengths, one per word.
        #[arg(long, conflicts_with = "input", requires = "sentence", allow_hyphen_values = true)]
        lengths: Option<String>,
        #[arg(long, default_value = "neutral")]
        emotion: String,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

/// An error caused by user-supplied input (exit code 2).
#[derive(Debug)]
pub struct InputError(pub anyhow::Error);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

pub trait InputContext<T> {
    fn input(self, ctx: impl fmt::Display) -> anyhow::Result<T>;
}

impl<T, E: Into<anyhow::Error>> InputContext<T> for Result<T, E> {
    fn input(self, ctx: impl fmt::Display) -> anyhow::Result<T> {
        self.map_err(|e| InputError(e.into().context(ctx.to_string())).into())
    }
}

fn is_numeric(e: &wordlen::Error) -> bool {
    matches!(e, wordlen::Error::NonFiniteLoss { .. } | wordlen::Error::NonFiniteGradient(_))
}

/// 3 for numeric failures, 2 for input errors, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let numeric = |e: &anyhow::Error| e.chain().any(|c| c.downcast_ref::<wordlen::Error>().is_some_and(is_numeric));
    if numeric(err) {
        return 3;
    }
    if let Some(InputError(inner)) = err.downcast_ref::<InputError>() {
        return if numeric(inner) { 3 } else { 2 };
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
