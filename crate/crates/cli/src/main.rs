//! `opdyn`: command-line front end for the opinion-dynamics toolkit.
//!
//! Exit codes: 0 success, 2 usage/config errors, 3 numerical failure,
//! 4 excessive trial failures (more than 1% of trials).

mod commands;
mod manifest;

use clap::{Parser, Subcommand};

pub(crate) struct CmdError {
    pub code: i32,
    pub msg: String,
}

pub(crate) type CmdResult<T = ()> = Result<T, CmdError>;

impl From<opdyn_core::Error> for CmdError {
    fn from(e: opdyn_core::Error) -> Self {
        let code = match &e {
            opdyn_core::Error::NumericalFailure { .. } => 3,
            _ => 2,
        };
        CmdError { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError { code: 2, msg: e.to_string() }
    }
}

impl From<toml::de::Error> for CmdError {
    fn from(e: toml::de::Error) -> Self {
        CmdError { code: 2, msg: format!("config: {e}") }
    }
}

impl From<serde_json::Error> for CmdError {
    fn from(e: serde_json::Error) -> Self {
        CmdError { code: 2, msg: e.to_string() }
    }
}

impl From<csv::Error> for CmdError {
    fn from(e: csv::Error) -> Self {
        CmdError { code: 2, msg: e.to_string() }
    }
}

#[derive(Parser)]
#[command(
    name = "opdyn",
    version,
    about = "Opinion dynamics under platform influence: simulation and analysis",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact two-agent analysis: classification, simulation, phase regions,
    /// band-crossing eigenstructure
    #[command(subcommand, name = "two-agent")]
    TwoAgent(commands::two_agent::TwoAgentCmd),
    /// Two-block stochastic networks: generation, concentration checks,
    /// single simulations
    #[command(subcommand)]
    Sbm(commands::sbm::SbmCmd),
    /// Monte Carlo experiment suites (CSV + JSON manifest outputs)
    Experiment(commands::experiment::ExperimentCmd),
    /// Simulations on a fixed labeled graph loaded from files
    #[command(subcommand)]
    Graph(commands::graph::GraphCmd),
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::TwoAgent(cmd) => commands::two_agent::run(cmd),
        Command::Sbm(cmd) => commands::sbm::run(cmd),
        Command::Experiment(cmd) => commands::experiment::run(cmd),
        Command::Graph(cmd) => commands::graph::run(cmd),
    }
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.msg);
            std::process::exit(e.code);
        }
    }
}
