use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reeskit::cli::{self, CliError, CommandOutput, RunOptions, Tier};
use reeskit::polyring::MonomialOrder;

#[derive(Parser)]
#[command(name = "reeskit", version, about = "Defining equations of Rees algebras with a Groebner-basis certificate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Seed for the rational specialization (overrides the document).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monomial order for printed bases: degrevlex or lex.
    #[arg(long, global = true, value_parser = parse_order)]
    order: Option<MonomialOrder>,
    /// Write the machine-readable report to this path.
    #[arg(long, global = true, value_name = "OUT")]
    json: Option<String>,
    /// Include wall-clock timings in the JSON report.
    #[arg(long, global = true)]
    timings: bool,
    /// Also print ideals pulled back to the input coordinates.
    #[arg(long, global = true)]
    original_coordinates: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the hypothesis checks.
    Check { file: String },
    /// Print the closed-form defining ideal.
    DefiningIdeal {
        file: String,
        /// Run the certificate (and the deformation check for modules).
        #[arg(long)]
        verify: bool,
        /// Compute the saturation oracle even when the hypotheses fail.
        #[arg(long)]
        force_oracle: bool,
    },
    /// Print the special fiber ideal and the analytic spread.
    Fiber { file: String },
    /// Print the Jacobian dual matrix and its blocks.
    JacobianDual { file: String },
    /// Compute the defining ideal by saturation.
    Oracle { file: String },
    /// List or run the embedded fixture corpus.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    List,
    Run {
        /// fast, medium or slow; defaults to REESKIT_TIER, then fast.
        #[arg(long)]
        tier: Option<Tier>,
    },
}

fn parse_order(s: &str) -> Result<MonomialOrder, String> {
    match s.parse()? {
        o @ (MonomialOrder::DegRevLex | MonomialOrder::Lex) => Ok(o),
        _ => Err(format!("unsupported order {s:?}")),
    }
}

fn run(cli: &Cli, opts: &RunOptions) -> Result<CommandOutput, CliError> {
    Ok(match &cli.command {
        Command::Check { file } => cli::cmd_check(&cli::read_document(file)?, opts)?,
        Command::DefiningIdeal { file, verify, force_oracle } => {
            cli::cmd_defining_ideal(&cli::read_document(file)?, *verify, *force_oracle, opts)?
        }
        Command::Fiber { file } => cli::cmd_fiber(&cli::read_document(file)?, opts)?,
        Command::JacobianDual { file } => cli::cmd_jacobian_dual(&cli::read_document(file)?, opts)?,
        Command::Oracle { file } => cli::cmd_oracle(&cli::read_document(file)?, opts)?,
        Command::Fixtures { action: FixtureAction::List } => cli::cmd_fixtures_list(),
        Command::Fixtures { action: FixtureAction::Run { tier } } => {
            cli::cmd_fixtures_run(tier.unwrap_or_else(Tier::from_env), opts)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let opts =
        RunOptions { seed: g.seed, order: g.order, timings: g.timings, original_coordinates: g.original_coordinates };
    let mut output = run(&cli, &opts).unwrap_or_else(|e| CommandOutput::operational(&e));
    print!("{}", output.text);
    if let Some(path) = &g.json {
        let body = serde_json::to_string_pretty(&output.json).expect("report serializes") + "\n";
        if let Err(e) = std::fs::write(path, body) {
            output = CommandOutput::operational(&CliError::Io(format!("{path}: {e}")));
            eprint!("{}", output.text);
        }
    }
    ExitCode::from(output.exit.code() as u8)
}
