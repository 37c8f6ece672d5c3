//! Command-line front end: list experiments, run them to CSV, verify the
//! acceptance criteria.
//!
//! Exit codes: 0 success, 1 configuration/usage error, 2 numeric failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use emqsim_core::acceptance::{criterion_names, run_criterion};
use emqsim_core::runner::{run_experiment, validate_config, registry};
use emqsim_core::Error;

#[derive(Parser)]
#[command(name = "emqsim", about = "Pulse-level simulator of the electromechanical two-qubit platform", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the experiment registry.
    List,
    /// Run one experiment and write its CSV table.
    Run {
        /// Experiment name (see `list`).
        experiment: String,
        /// Flat key-value config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Coarsen sweeps and relax the integration step 4x.
        #[arg(long)]
        fast: bool,
    },
    /// Run the acceptance suite, one pass/fail line per criterion.
    Verify {
        /// Smoke mode: relaxed step and sweep density, unchanged tolerances.
        #[arg(long)]
        fast: bool,
        /// Run a single criterion (1-10).
        #[arg(long)]
        only: Option<usize>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            // configuration and usage problems -> 1; numeric failures -> 2
            let code = match e.downcast_ref::<Error>() {
                Some(Error::Config { .. })
                | Some(Error::UnknownExperiment { .. })
                | Some(Error::InvalidPulse(_))
                | Some(Error::InvalidDimension(_)) => 1,
                Some(_) => 2,
                None => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (name, desc) in registry() {
                println!("{name:8} {desc}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { experiment, config, out, fast } => {
            let text = match &config {
                Some(p) => std::fs::read_to_string(p)?,
                None => String::new(),
            };
            let mut cfg = validate_config(&experiment, &text)?;
            cfg.fast = fast;
            let started = Instant::now();
            let table = run_experiment(&cfg)?;
            let wall = started.elapsed().as_secs_f64();

            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            let path = dir.join(format!("{experiment}.csv"));
            let mut f = std::fs::File::create(&path)?;
            // deterministic table first; wall-clock on the final line so
            // regression diffs can ignore exactly one line
            f.write_all(table.to_csv().as_bytes())?;
            writeln!(f, "# wallclock_s = {wall:.3}")?;
            eprintln!("{experiment}: {} rows -> {}", table.rows.len(), path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { fast, only } => {
            let ids: Vec<usize> = match only {
                Some(id) => vec![id],
                None => (1..=10).collect(),
            };
            let mut all_ok = true;
            for id in ids {
                let name = criterion_names()[id - 1].1;
                match run_criterion(id, fast) {
                    Ok(o) => {
                        println!(
                            "criterion {id:2} [{}] {name}: {}",
                            if o.passed { "PASS" } else { "FAIL" },
                            o.details
                        );
                        all_ok &= o.passed;
                    }
                    Err(e) => {
                        println!("criterion {id:2} [FAIL] {name}: error: {e}");
                        all_ok = false;
                    }
                }
            }
            Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}
