mod commands;
mod corpus;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divpop_core::{EnumerationMode, Search, Variant, DEFAULT_CAP};
use serde_json::json;

use report::{CliError, Exit, Inputs, RunReport};

#[derive(Parser)]
#[command(name = "divpop", version, about = "Popularity in roommate diversity games")]
struct Cli {
    /// Print a short text summary instead of the JSON report.
    #[arg(long, global = true)]
    human: bool,
    /// Worker threads for parallel searches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Bruteforce,
    Signature,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Labeled,
    Orbit,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Strict,
    Mixed,
    Popularity,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "signature")]
    strategy: StrategyArg,
    /// Largest number of outcomes or signatures a search may visit.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
}

impl SearchArgs {
    fn search(&self) -> Search {
        match self.strategy {
            StrategyArg::Bruteforce => Search::bruteforce(),
            StrategyArg::Signature => Search::signature(),
        }
        .with_cap(self.cap)
    }
}

#[derive(Args)]
struct ModeArgs {
    #[arg(long, value_enum, default_value = "labeled")]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
}

impl ModeArgs {
    fn mode(&self) -> EnumerationMode {
        match self.mode {
            ModeArg::Labeled => EnumerationMode::Labeled,
            ModeArg::Orbit => EnumerationMode::Orbit,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Is the outcome popular?
    CheckPopular {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        outcome: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Is the outcome strictly popular?
    CheckStrict {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        outcome: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Search for a popular outcome.
    FindPopular {
        #[arg(long)]
        game: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Popular outcome of a room-size-two game.
    SolveS2 {
        #[arg(long)]
        game: PathBuf,
    },
    /// Compute a mixed popular outcome.
    Mixed {
        #[arg(long)]
        game: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        /// Also write the mixed outcome to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a mixed outcome against every pure challenger.
    VerifyMixed {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        mixed: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Build a reduction from an X3C instance.
    Reduce {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        x3c: PathBuf,
        /// Directory for the game, group listing and predefined outcomes.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also check the construction's defining properties.
        #[arg(long)]
        deep: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Solve an X3C instance.
    X3cSolve {
        #[arg(long)]
        x3c: PathBuf,
        /// List every exact cover.
        #[arg(long)]
        all: bool,
    },
    /// The nine-agent game without a popular outcome.
    Counterexample {
        /// Refute every outcome by exhaustive search.
        #[arg(long)]
        verify: bool,
        /// Write the game to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List outcomes, orbit representatives or signatures.
    Enumerate {
        #[arg(long)]
        game: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        signatures: bool,
    },
    /// Print the JSON schemas of the file formats.
    Schema {
        /// One of game, outcome, mixed, verdict, x3c, bundle.
        name: Option<String>,
    },
    /// Compare the search strategies on a seeded random corpus.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        games: usize,
    },
}

fn dispatch(cmd: &Command, inputs: &mut Inputs) -> Result<report::Finding, CliError> {
    use commands::*;
    match cmd {
        Command::CheckPopular {
            game,
            outcome,
            search,
        } => check_popular(inputs, game, outcome, &search.search(), false),
        Command::CheckStrict {
            game,
            outcome,
            search,
        } => check_popular(inputs, game, outcome, &search.search(), true),
        Command::FindPopular { game, search } => find(inputs, game, &search.search()),
        Command::SolveS2 { game } => solve_s2(inputs, game),
        Command::Mixed { game, mode, out } => {
            mixed(inputs, game, mode.mode(), mode.cap, out.as_deref())
        }
        Command::VerifyMixed { game, mixed, cap } => verify_mixed(inputs, game, mixed, *cap),
        Command::Reduce {
            variant,
            x3c,
            out,
            deep,
            cap,
        } => {
            let variant = match variant {
                VariantArg::Strict => Variant::Strict,
                VariantArg::Mixed => Variant::Mixed,
                VariantArg::Popularity => Variant::Popularity,
            };
            reduce(inputs, variant, x3c, out.as_deref(), *deep, *cap)
        }
        Command::X3cSolve { x3c, all } => solve_x3c(inputs, x3c, *all),
        Command::Counterexample { verify, out } => counterexample(*verify, out.as_deref()),
        Command::Enumerate {
            game,
            mode,
            signatures,
        } => enumerate(inputs, game, mode.mode(), mode.cap, *signatures),
        Command::Schema { name } => schema(name.as_deref()),
        Command::Selftest { seed, games } => selftest(*seed, *games),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("divpop: {e}");
            return ExitCode::from(1);
        }
    }
    let started = Instant::now();
    let mut inputs = Inputs::default();
    let (result, exit, summary) = match dispatch(&cli.command, &mut inputs) {
        Ok(f) => (f.result, f.exit, f.summary),
        Err(e) => {
            eprintln!("divpop: {e}");
            let result = json!({"error": {"code": e.code(), "message": e.to_string()}});
            (result, Exit::Failure, vec![format!("error [{}]: {e}", e.code())])
        }
    };
    let report = RunReport {
        command: std::env::args().skip(1).collect(),
        inputs: inputs.digests,
        result,
        duration_ms: started.elapsed().as_millis(),
        exit_status: exit as i32,
    };
    let mut out = std::io::stdout().lock();
    let _ = if cli.human {
        summary
            .iter()
            .try_for_each(|line| writeln!(out, "{line}"))
            .and_then(|_| writeln!(out, "({} ms, exit {})", report.duration_ms, report.exit_status))
    } else {
        let text = serde_json::to_string_pretty(&report).expect("reports serialize");
        writeln!(out, "{text}")
    };
    ExitCode::from(exit as u8)
}
