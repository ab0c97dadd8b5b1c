//! `wiggle`: config-driven runs of the wiggle-core models.

mod commands;
mod config;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wiggle_core::valley::ValleyMode;

use commands::Context;
use failure::{Failure, RunResult};

/// Output root used when `--out` is absent.
const OUT_ENV: &str = "WIGGLE_OUT";

#[derive(Parser)]
#[command(name = "wiggle", version, about = "Valley splitting in Wiggle Well heterostructures")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML or JSON config; a previous run's manifest.json also works.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output folder. Defaults to `$WIGGLE_OUT/<command>`, or
    /// `wiggle-out/<command>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed (ensemble) or first seed (dot-sweep).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// perturbative or two-component.
    #[arg(long, global = true)]
    mode: Option<ValleyMode>,

    /// Bloch coefficient table CSV.
    #[arg(long, global = true)]
    table: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Concentration profile, potential and envelope states.
    Profile,
    /// Valley splitting against the Wiggle wavevector.
    ScanQ,
    /// Alloy-disorder ensemble of one dot.
    Ensemble,
    /// Paired moving/stationary dot sweeps.
    DotSweep,
    /// Fit charge-sensor transition traces.
    FitTransition {
        /// Trace CSVs, replacing the config's list.
        traces: Vec<PathBuf>,
    },
    /// Fit the lever arm and base electron temperature.
    FitLeverarm {
        /// Trace CSVs with T_MC, replacing the config's list.
        traces: Vec<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Profile => "profile",
            Command::ScanQ => "scan-q",
            Command::Ensemble => "ensemble",
            Command::DotSweep => "dot-sweep",
            Command::FitTransition { .. } => "fit-transition",
            Command::FitLeverarm { .. } => "fit-leverarm",
        }
    }
}

fn run(cli: Cli) -> RunResult<()> {
    let out = cli.out.clone().unwrap_or_else(|| {
        let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("wiggle-out"), PathBuf::from);
        root.join(cli.command.name())
    });
    let workers = match cli.workers {
        Some(0) => return Err(Failure::config("--workers must be at least 1")),
        Some(n) => n,
        None => rayon::current_num_threads(),
    };
    let ctx = Context {
        config: cli.config.clone(),
        out,
        seed: cli.seed,
        workers,
        mode: cli.mode,
        table: cli.table.clone(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::new("io", format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Profile => commands::profile::run(&ctx),
        Command::ScanQ => commands::scan::run(&ctx),
        Command::Ensemble => commands::ensemble::run(&ctx),
        Command::DotSweep => commands::sweep::run(&ctx),
        Command::FitTransition { traces } => commands::fit::run_transition(&ctx, traces),
        Command::FitLeverarm { traces } => commands::fit::run_lever_arm(&ctx, traces),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            eprintln!(
                "{}",
                serde_json::json!({ "category": f.category, "exit_code": f.exit_code(), "message": f.message })
            );
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
