//! `gembed` command-line pipelines: train embeddings, evaluate them, project
//! them to 2-D and measure stability across snapshots.

mod embed;
mod evaluate;
mod files;
mod project;
mod stability;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit code for usage errors; clap uses the same code for parse failures.
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "gembed", version, about = "Graph embeddings: random-walk, LINE and Gaussian methods")]
struct Cli {
    /// Master seed; every random component derives its own stream from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads. 1 gives bit-identical reruns.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train an embedding and write it with its id map and config echo.
    Embed(embed::EmbedArgs),
    /// Score an embedding on link prediction, node classification or clustering.
    Eval(evaluate::EvalArgs),
    /// Project an embedding to 2-D coordinates.
    Project(project::ProjectArgs),
    /// Stability constant over a sequence of snapshots and their embeddings.
    Stability(stability::StabilityArgs),
}

/// Invalid invocation: missing inputs or inconsistent options.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Shared run settings passed to every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Globals {
    pub seed: u64,
    pub threads: usize,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<gembed::Error>() {
        Some(gembed::Error::Config(_)) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if cli.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    let globals = Globals { seed: cli.seed, threads: cli.threads };
    match cli.command {
        Command::Embed(args) => embed::run(&args, globals),
        Command::Eval(args) => evaluate::run(&args, globals),
        Command::Project(args) => project::run(&args),
        Command::Stability(args) => stability::run(&args, globals),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
