//! `semiadv`: encode, corrupt and decode words, and run decoding experiments.

mod commands;
mod config;
mod experiment;
mod theory;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Environment variable holding the default worker thread count.
pub const THREADS_ENV: &str = "SEMIADV_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Io(_) | CliError::Run(_) => 1,
        }
    }
}

impl From<semiadv::Error> for CliError {
    fn from(e: semiadv::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "semiadv", version, about = "Unique decoding of Reed-Solomon-type codes under semi-adversarial errors")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Encode a message file (or a seeded random message) into a word.
    Encode(Args),
    /// Pass a word through the semi-adversarial channel.
    Corrupt(Args),
    /// Decode a received word.
    Decode(Args),
    /// Run the Monte Carlo grid from the config and write CSV and JSON.
    Experiment(Args),
    /// Time the decoder over increasing lengths.
    Bench(Args),
    /// Build and verify a list-size lower-bound witness.
    Gssb(Args),
    /// Check unique decodability by ball enumeration.
    Ballcheck(Args),
}

#[derive(clap::Args)]
pub struct Args {
    /// TOML configuration file.
    pub config: PathBuf,
    /// Input message or word file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path or prefix; overrides the config's `output`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Run(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.cmd {
        Cmd::Encode(a) => commands::encode(&a),
        Cmd::Corrupt(a) => commands::corrupt(&a),
        Cmd::Decode(a) => commands::decode(&a),
        Cmd::Experiment(a) => commands::experiment(&a),
        Cmd::Bench(a) => commands::bench(&a),
        Cmd::Gssb(a) => commands::gssb(&a),
        Cmd::Ballcheck(a) => commands::ballcheck(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semiadv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
