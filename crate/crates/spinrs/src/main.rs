//! Command-line front end: simulate / check / compare.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver breakdown,
//! 4 verification-suite failure.

use clap::{Parser, Subcommand};
use spinrs::cli::{cmd_check, cmd_compare, cmd_simulate, RunConfig};
use spinrs::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "spinrs", about = "Hyperbolic spin Ruijsenaars-Schneider simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured trajectory and write CSV + summary JSON.
    Simulate {
        /// Path to a RunConfig JSON file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for trajectory.csv and summary.json.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Override the seed recorded in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a randomized verification suite.
    Check {
        /// skew | equivariance | mdybe | commute | jacobi | theta | all
        #[arg(long)]
        suite: String,
        /// Rank n of SL(n+1).
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// "full" or comma-separated simple-root indices, e.g. "1,3".
        #[arg(long, default_value = "full")]
        pi_prime: String,
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Accuracy/cost table of both solvers against a refined reference.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated RK45 relative tolerances, e.g. "1e-6,1e-9".
        #[arg(long)]
        rtol_list: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Dimension(_) | Error::Range(_) | Error::Composability(_) => 2,
        _ => 3,
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            config,
            out_dir,
            seed,
        } => {
            let cfg = load_config(&config, seed)?;
            let out = cmd_simulate(&cfg, &out_dir)?;
            println!(
                "wrote {} and {}",
                out.csv_path.display(),
                out.summary_path.display()
            );
            if out.broke_down {
                eprintln!(
                    "breakdown at t = {:.6}; trajectory truncated to {} samples",
                    out.summary.breakdown.unwrap(),
                    out.summary.samples_produced
                );
                return Ok(3);
            }
            Ok(0)
        }
        Command::Check {
            suite,
            n,
            pi_prime,
            kappa,
            seed,
            samples,
        } => {
            let out = cmd_check(&suite, n, &pi_prime, kappa, seed, samples)?;
            for line in &out.lines {
                println!("{line}");
            }
            Ok(if out.all_passed { 0 } else { 4 })
        }
        Command::Compare {
            config,
            rtol_list,
            seed,
        } => {
            let cfg = load_config(&config, seed)?;
            let rtols: Vec<f64> = rtol_list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Config(format!("rtol_list: {e}")))
                })
                .collect::<Result<_, _>>()?;
            let table = cmd_compare(&cfg, &rtols)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&table).expect("table serialization")
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
