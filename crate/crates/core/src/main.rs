use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use stabl::experiment::{error_json, run_experiment, validate_config, DEFAULT_OUTPUT_DIR};
use stabl::Error;

/// Run strongly adaptive bandit experiments from a TOML config.
#[derive(Debug, Parser)]
#[command(name = "stabl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every (algorithm, seed) pair and write CSV and JSON artifacts.
    Run {
        config: PathBuf,
        /// Output root; overrides `output_dir` in the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, env = "STABL_WORKERS")]
        workers: Option<usize>,
        /// Validate the config and stop.
        #[arg(long)]
        validate_only: bool,
    },
    /// Validate a config and print its normalized form.
    Validate { config: PathBuf },
}

fn fail(err: &Error) -> ExitCode {
    println!("{}", serde_json::to_string_pretty(&error_json(err)).expect("json value"));
    match err {
        Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn print_config(path: &PathBuf) -> ExitCode {
    match validate_config(path) {
        Ok(cfg) => {
            println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => print_config(&config),
        Command::Run {
            config,
            validate_only: true,
            ..
        } => print_config(&config),
        Command::Run {
            config,
            out_dir,
            workers,
            validate_only: false,
        } => {
            let cfg = match validate_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let root = out_dir
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
            let workers = workers
                .filter(|&w| w > 0)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            match run_experiment(&cfg, &root, workers) {
                Ok((dir, results)) => {
                    eprintln!(
                        "wrote {} runs to {} in {:.2}s",
                        results.runs.len(),
                        dir.display(),
                        results.wall_clock_seconds
                    );
                    for a in &cfg.algorithms {
                        let (mean, se) = results.total_reward(&a.label);
                        let what = if cfg.is_convex() { "total loss" } else { "total reward" };
                        let mean = if cfg.is_convex() { -mean } else { mean };
                        println!("{:<24} {what} {mean:.3} +- {se:.3}", a.label);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    let dir = root.join(&cfg.name);
                    if std::fs::create_dir_all(&dir).is_ok() {
                        let _ = std::fs::write(
                            dir.join("error.json"),
                            serde_json::to_string_pretty(&error_json(&e)).expect("json value"),
                        );
                    }
                    fail(&e)
                }
            }
        }
    }
}
