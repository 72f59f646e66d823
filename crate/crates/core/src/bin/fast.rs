use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fast_shadow::harness::{exit_code, run_experiment, run_oracle, scaling_study, ExperimentConfig, SweepConfig};
use fast_shadow::Result;

#[derive(Parser)]
#[command(name = "fast", version, about = "Correlation-function estimators on a simulated quantum device")]
struct Cli {
    /// Worker threads; overrides FAST_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the estimators of an experiment config and compare with the oracle.
    Run {
        config: PathBuf,
        /// Exit with status 3 if the oracle comparison fails.
        #[arg(long)]
        check: bool,
    },
    /// Write exact oracle values for an experiment config.
    Oracle { config: PathBuf },
    /// Sweep mode counts and fit circuit-count exponents.
    Scaling { sweep: PathBuf },
}

fn thread_count(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| std::env::var("FAST_THREADS").ok()?.parse().ok())
        .filter(|&n| n > 0)
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Run { config, check } => {
            let config = ExperimentConfig::load(&config)?;
            let (output, log) = run_experiment(&config)?;
            println!(
                "wrote {} ({} circuits, {} shots, {:.2}s)",
                log.files.csv.display(),
                log.circuits_total,
                log.shots_total,
                log.wall_time_s
            );
            match &output.report {
                Some(report) => {
                    println!(
                        "{}/{} entries within eps = {}; max |error| = {:.3e}",
                        report.within_eps, report.entries, report.eps, report.max_abs_error
                    );
                    if check && !report.pass {
                        eprintln!(
                            "check failed: fraction within eps {:.3} < {}",
                            report.fraction_within_eps, report.check_fraction
                        );
                        return Ok(3);
                    }
                }
                None if check => {
                    eprintln!("check failed: no oracle above {} modes", fast_shadow::harness::MAX_ORACLE_MODES);
                    return Ok(3);
                }
                None => {}
            }
            Ok(0)
        }
        Command::Oracle { config } => {
            let config = ExperimentConfig::load(&config)?;
            let (oracle, json, csv) = run_oracle(&config)?;
            println!(
                "ground energy {:.12}; wrote {} and {}",
                oracle.ground_energy,
                json.display(),
                csv.display()
            );
            Ok(0)
        }
        Command::Scaling { sweep } => {
            let sweep = SweepConfig::load(&sweep)?;
            let report = scaling_study(&sweep)?;
            println!("{:>4} {:>12} {:>12} {:>14}", "n", "circuits", "closed_form", "shots");
            for row in &report.rows {
                let closed = row.closed_form.map_or("-".to_string(), |c| c.to_string());
                println!("{:>4} {:>12} {:>12} {:>14}", row.n, row.circuits_total, closed, row.shots_total);
            }
            let expected = report.expected_exponent.map_or("-".to_string(), |e| format!("{e}"));
            println!(
                "circuit slope {:.3} (expected {expected}), shot slope {:.3}, counts match: {}",
                report.circuit_slope, report.shot_slope, report.counts_match
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli.threads) {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
