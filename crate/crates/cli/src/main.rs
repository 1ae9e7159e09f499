//! `vc2reg`: generate instances, measure decompositions and run the
//! compression pipeline from the command line.

mod commands;
mod document;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use document::Format;

#[derive(Parser, Debug)]
#[command(name = "vc2reg", version, about = "Regular decompositions of 3-graphs of bounded VC2-dimension")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (report commands) or directory (`generate`, `compress`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in the report (makes reports run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance from a JSON parameter file.
    Generate { params: PathBuf },
    /// Measure a hypergraph and, optionally, a decomposition of it.
    Analyze(commands::AnalyzeArgs),
    /// Compress a decomposition with a schedule.
    Compress { hypergraph: PathBuf, decomposition: PathBuf, schedule: PathBuf },
    /// Print a schedule with every constant resolved.
    ScheduleDump { schedule: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let res = match &cli.command {
        Command::Generate { params } => commands::generate(&cli.common, params),
        Command::Analyze(a) => commands::analyze(&cli.common, a),
        Command::Compress { hypergraph, decomposition, schedule } => {
            commands::compress(&cli.common, hypergraph, decomposition, schedule)
        }
        Command::ScheduleDump { schedule } => commands::schedule_dump(&cli.common, schedule),
    };
    match res {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
