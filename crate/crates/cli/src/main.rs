//! `onestreet`: solve one-street poker games, build datasets of solved
//! games, and train, evaluate and explain strategy models over them.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 convergence
//! failure.

mod commands;
mod dealspec;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use onestreet::equilibrium::{DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS};
use onestreet::{Error, GameConfig, RepresentationId};

use dealspec::Preset;

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConvergenceFailure { .. } | Error::GenerationFailed { .. } => 3,
            Error::InvalidConfig(_) => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: 2, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self { code: 2, message: e.to_string() }
    }
}

pub type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "onestreet", version, about = "Solve one-street poker games and learn readable strategies from them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct GameArgs {
    /// Game config file (`key = value` lines: deck_size, bet_steps,
    /// bet_increment, ante, stack); unset keys keep their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl GameArgs {
    pub fn load(&self) -> Result<GameConfig, Failure> {
        match &self.config {
            Some(p) => GameConfig::load(p).map_err(|e| match e {
                Error::Io(io) => Failure::usage(format!("cannot read config {}: {io}", p.display())),
                other => Failure::usage(other.to_string()),
            }),
            None => Ok(GameConfig::default()),
        }
    }
}

#[derive(Args, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// File holding deck_size² joint probabilities (row = player 1's card)
    /// or two pdfs of deck_size entries (player 1's first).
    #[arg(long, conflicts_with_all = ["preset", "p1"])]
    pub deal: Option<PathBuf>,
    /// One of the worked-example deals.
    #[arg(long, value_enum, conflicts_with = "p1")]
    pub preset: Option<Preset>,
    /// Player 1's card pdf, comma separated (needs --p2).
    #[arg(long, requires = "p2", allow_hyphen_values = true)]
    pub p1: Option<String>,
    /// Player 2's card pdf, comma separated (needs --p1).
    #[arg(long, requires = "p1", allow_hyphen_values = true)]
    pub p2: Option<String>,
    /// Target NashConv in dollars.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
    /// Also write the solution as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct GenArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Number of games.
    #[arg(long, default_value_t = onestreet::dataset::DEFAULT_COUNT)]
    pub count: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Dataset file to write (JSON lines).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Knn,
    Tree,
}

#[derive(Args, Clone)]
pub struct SplitArgs {
    /// Fraction of games used for training.
    #[arg(long, default_value_t = 0.8)]
    pub train_frac: f64,
    /// Seed for the train/test split and for sampling bets (R7–R10).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Clone)]
pub struct TrainArgs {
    /// Dataset produced by `gen`.
    #[arg(long)]
    pub data: PathBuf,
    /// Representation, r1 … r10.
    #[arg(long)]
    pub rep: RepresentationId,
    #[arg(long, value_enum, default_value_t = ModelKind::Tree)]
    pub model: ModelKind,
    /// Tree depth limit.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// Tree minimum examples per leaf.
    #[arg(long, default_value_t = 5)]
    pub min_leaf: usize,
    /// Neighbors for k-NN.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Model file to write (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Clone)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub split: SplitArgs,
    /// CSV report to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct SweepArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Representations, comma separated; all ten by default.
    #[arg(long, value_delimiter = ',')]
    pub rep: Vec<RepresentationId>,
    /// Depth range, e.g. `3-12`.
    #[arg(long, default_value = "3-12")]
    pub depths: String,
    #[arg(long, default_value_t = 5)]
    pub min_leaf: usize,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Output directory for `sweep.csv` and the SVG charts.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Clone)]
pub struct RulesArgs {
    /// Tree model produced by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct CheckArgs {
    /// Solved games to probe.
    #[arg(long)]
    pub probes: PathBuf,
    /// Model to measure alongside the stored equilibrium strategies.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// JSON report to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one game and print player 1's strategy.
    Solve(SolveArgs),
    /// Sample and solve random games into a dataset.
    Gen(GenArgs),
    /// Train a k-NN or tree model on a dataset's training split.
    Train(TrainArgs),
    /// Report a model's training and test error.
    Eval(EvalArgs),
    /// Tree error against depth and size for several representations.
    Sweep(SweepArgs),
    /// Print a tree as an ordered rule list.
    Rules(RulesArgs),
    /// Measure 80-20 and all-in rule compliance.
    Check(CheckArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Gen(a) => commands::gen(a),
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Rules(a) => commands::rules(a),
        Command::Check(a) => commands::check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
