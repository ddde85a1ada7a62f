use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use causaltask::commands::{self, InputError};
use causaltask::demo::DemoParams;
use causaltask::report::{Format, Report};
use causaltask::scenario::{parse_scenario, ScenarioDocument};

#[derive(Parser)]
#[command(
    name = "causaltask",
    version,
    about = "Relativistic information task simulator and feasibility checker"
)]
struct Cli {
    /// Output style; `machine` prints only the key=value section.
    #[arg(long, value_enum, default_value_t = FormatArg::Human, global = true)]
    format: FormatArg,
    /// Worker threads for search and sweeps. Output does not depend on it.
    #[arg(long, default_value_t = 1, global = true)]
    parallel: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and, for summoning tasks, the causal order of its points.
    Validate { file: PathBuf },
    /// Run the built-in strategy for one call pattern and print the transcript.
    ///
    /// refined: echo; original: relay agent; summoning: the token plan found by `token`.
    Run {
        file: PathBuf,
        /// `{1,2}` for summoning and original tasks, `(0,1)` for refined.
        #[arg(long)]
        pattern: String,
        /// Relay site for original tasks [default: D/2].
        #[arg(long)]
        relay: Option<i64>,
    },
    /// Decide feasibility by exhaustive strategy enumeration.
    ///
    /// refined: the 16 local response maps, or all transducers if `states` is
    /// set; original: transducers with `states` (default 1).
    Search {
        file: PathBuf,
        /// Relay site for original tasks [default: D/2].
        #[arg(long)]
        relay: Option<i64>,
        /// Give up after this many milliseconds (exit 3).
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Decide feasibility of a summoning task for a single classical token.
    Token { file: PathBuf },
    /// Run a built-in demo.
    Demo {
        name: String,
        #[arg(long, default_value_t = 8)]
        d: i64,
        #[arg(long, default_value_t = 1)]
        eps: i64,
        /// Check one relay site instead of all of them.
        #[arg(long)]
        relay: Option<i64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Human => Format::Human,
        FormatArg::Machine => Format::Machine,
    };
    match execute(&cli) {
        Ok(report) => {
            print!("{}", report.render(format));
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Report::input_error(e.0).code)
        }
    }
}

fn load(path: &PathBuf) -> Result<ScenarioDocument, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<Report, InputError> {
    match &cli.command {
        Command::Validate { file } => commands::validate(&load(file)?),
        Command::Run {
            file,
            pattern,
            relay,
        } => commands::run_pattern(&load(file)?, pattern, *relay),
        Command::Search {
            file,
            relay,
            budget_ms,
        } => {
            let budget = budget_ms.map(Duration::from_millis);
            commands::search(&load(file)?, *relay, budget, cli.parallel)
        }
        Command::Token { file } => commands::token(&load(file)?),
        Command::Demo {
            name,
            d,
            eps,
            relay,
        } => {
            let params = DemoParams {
                d: *d,
                eps: *eps,
                relay: *relay,
                workers: cli.parallel,
            };
            commands::demo(name, &params)
        }
    }
}
