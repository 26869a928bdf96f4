//! `inls`: runs ground-state solves, evolutions, analyses and the canned
//! experiments from a flat TOML config, writing every artifact to one
//! directory.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Output;
use config::RunConfig;
use inls::InlsError;

#[derive(Parser)]
#[command(name = "inls", version, about = "Inhomogeneous NLS experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat TOML config; unset keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Corpus seed (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Keep a field snapshot every N samples (overrides `snapshots`).
    #[arg(long, global = true)]
    snapshots: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the ground state and write `Q.bin` with its sidecar.
    GroundState,
    /// Evolve the configured initial data and write `trajectory.csv`.
    Evolve,
    /// Evolve, fit the blow-up and write the concentration analysis.
    Analyze,
    /// Run the inequality suite over the seeded corpus.
    Verify,
    /// Sample the standing wave or the blow-up family at `exact_times`.
    Exact,
    /// Run a registered experiment and report against its thresholds.
    Reproduce { name: String },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(k) = cli.snapshots {
        cfg.snapshots = k;
    }
    cfg.validate()?;
    let out = Output::create(&cfg.output_dir)?;
    match &cli.command {
        Command::GroundState => commands::ground_state(&cfg, &out),
        Command::Evolve => commands::evolve_cmd(&cfg, &out),
        Command::Analyze => commands::analyze(&cfg, &out),
        Command::Verify => commands::verify(&cfg, &out),
        Command::Exact => commands::exact(&cfg, &out),
        Command::Reproduce { name } => commands::reproduce(name, &cfg, &out),
    }
}

/// 2 for bad input, 3 for numerical failure, 1 for anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<InlsError>() {
            return match e {
                _ if e.is_validation() => 2,
                InlsError::Io(_) | InlsError::Json(_) => 1,
                _ => 3,
            };
        }
        if cause.downcast_ref::<toml::de::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("inls: some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("inls: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
