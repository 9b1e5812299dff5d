//! `andergraph`: Anderson-model experiments on locally finite graphs.
//!
//! Subcommand map: `graph build` constructs finite graph truncations;
//! `saw count` / `saw assumption` enumerate self-avoiding walks and sum
//! weighted walk series; `moments estimate` / `bounds verify` sample
//! Green-function moments and check them against combinatorial decay bounds;
//! `dynamics scan` tracks time-averaged position moments over disorder;
//! `lemmas check` exercises the supporting limit statements; `run` drives a
//! whole experiment from a config file and `report` summarizes its record.
//!
//! Exit codes: 0 on success, 2 for rejected input (flags, config files, graph
//! files, vertex references), 3 for failures inside an accepted computation.

mod commands;
mod config;
mod error;
mod experiments;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    BoundsVerifyArgs, DynamicsScanArgs, GraphBuildArgs, LemmasCheckArgs, MomentsEstimateArgs,
    SawAssumptionArgs, SawCountArgs,
};

#[derive(Debug, Parser)]
#[command(
    name = "andergraph",
    version,
    about = "Anderson-model experiments on locally finite graphs",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a finite graph and write its text form
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Count self-avoiding walks and sum weighted walk series
    #[command(subcommand)]
    Saw(SawCmd),
    /// Estimate Green-function moments between vertex pairs
    #[command(subcommand)]
    Moments(MomentsCmd),
    /// Check moment bounds distance by distance
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Track time-averaged position moments over disorder realizations
    #[command(subcommand)]
    Dynamics(DynamicsCmd),
    /// Exercise the supporting limit statements numerically
    #[command(subcommand)]
    Lemmas(LemmasCmd),
    /// Run the experiment described by a config file
    Run {
        /// Flat key-value config file (`key = value`, dotted keys).
        #[arg(long)]
        config: PathBuf,
    },
    /// Summarize a run record produced by `run`
    Report {
        /// Path to a `record.json`.
        record: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum GraphCmd {
    /// Construct a graph family member and serialize it
    Build(GraphBuildArgs),
}

#[derive(Debug, Subcommand)]
enum SawCmd {
    /// Count self-avoiding walks by length from an origin
    Count(SawCountArgs),
    /// Sum a weighted walk series shell by shell and classify it
    Assumption(SawAssumptionArgs),
}

#[derive(Debug, Subcommand)]
enum MomentsCmd {
    /// Monte Carlo estimate of a Green-function moment for one vertex pair
    Estimate(MomentsEstimateArgs),
}

#[derive(Debug, Subcommand)]
enum BoundsCmd {
    /// Verify the moment bound at every distance up to a cap
    Verify(BoundsVerifyArgs),
}

#[derive(Debug, Subcommand)]
enum DynamicsCmd {
    /// Scan time-averaged position moments across disorder realizations
    Scan(DynamicsScanArgs),
}

#[derive(Debug, Subcommand)]
enum LemmasCmd {
    /// Check one of the limit statements on a concrete instance
    Check(LemmasCheckArgs),
}

fn dispatch(cli: Cli) -> Result<(), error::CliError> {
    match cli.command {
        Command::Graph(GraphCmd::Build(args)) => commands::graph_build(&args),
        Command::Saw(SawCmd::Count(args)) => commands::saw_count(&args),
        Command::Saw(SawCmd::Assumption(args)) => commands::saw_assumption(&args),
        Command::Moments(MomentsCmd::Estimate(args)) => commands::moments_estimate(&args),
        Command::Bounds(BoundsCmd::Verify(args)) => commands::bounds_verify(&args),
        Command::Dynamics(DynamicsCmd::Scan(args)) => commands::dynamics_scan(&args),
        Command::Lemmas(LemmasCmd::Check(args)) => commands::lemmas_check(&args),
        Command::Run { config } => experiments::run(&config),
        Command::Report { record } => experiments::report(&record),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
