use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use contagion_cli::{run, RunOptions};

/// Run one contagion experiment from a TOML config.
///
/// Environment: CONTAGION_WORKERS caps the worker pool, CONTAGION_OUTPUT_DIR
/// overrides the configured output directory.
#[derive(Debug, Parser)]
#[command(name = "contagion", version)]
struct Cli {
    /// Experiment config file.
    config: PathBuf,
    /// Replace the configured seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Check the config and exit without running.
    #[arg(long)]
    validate_only: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let opts = RunOptions {
        seed: cli.seed,
        validate_only: cli.validate_only,
        ..RunOptions::default()
    }
    .from_env();
    match run(&cli.config, &opts) {
        Ok(Some(manifest)) => {
            for f in &manifest.outputs {
                println!("{}", f.path.display());
            }
            ExitCode::SUCCESS
        }
        Ok(None) => {
            println!("config ok");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
