use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};

use ripa_cli::commands::{self, SpectraArgs};
use ripa_cli::scenario::Overrides;
use ripa_cli::CliError;

/// Resolvent-based flows and iterations for monotone operators: scenario
/// runs, the reference distance table, parameter sweeps, characteristic
/// spectra, and randomized operator audits.
#[derive(Parser)]
#[command(name = "ripa", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a JSON config; writes a trajectory CSV and a
    /// diagnostics JSON next to each other.
    Run {
        /// Path to the scenario JSON.
        #[arg(long)]
        config: PathBuf,
        /// Directory receiving the artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the adaptive integrator's relative tolerance.
        #[arg(long)]
        rtol: Option<f64>,
        /// Override the adaptive integrator's absolute tolerance.
        #[arg(long)]
        atol: Option<f64>,
        /// Switch to the fixed-step integrator with this step.
        #[arg(long, conflicts_with_all = ["rtol", "atol"])]
        dt: Option<f64>,
        /// Override the iteration count of a discrete scenario.
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Reproduce the built-in reference table: the rotation operator from
    /// (10, 10) under five dynamics, distance to the origin at t = 100.
    /// Exits nonzero if any row leaves its tolerance band.
    Table1 {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        rtol: Option<f64>,
        #[arg(long)]
        atol: Option<f64>,
        #[arg(long, conflicts_with_all = ["rtol", "atol"])]
        dt: Option<f64>,
    },
    /// Run a base scenario over a parameter grid (alpha, epsilon, index
    /// growth exponent p, decay exponent q); one CSV row per cell,
    /// failures recorded in-row.
    Sweep {
        /// Path to the sweep JSON ({"schema": 1, "base": {...}, "grid": {...}}).
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Tabulate the characteristic roots of the damped system along a
    /// regularization schedule.
    Spectra {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Damping coefficient.
        #[arg(long, default_value_t = 10.0)]
        alpha: f64,
        /// Margin of the quadratic schedule (ignored with --power/--lambda).
        #[arg(long, default_value_t = 1.25)]
        epsilon: f64,
        /// Use lambda(t) = t^POWER instead of the quadratic schedule.
        #[arg(long)]
        power: Option<f64>,
        /// Use a constant lambda instead of the quadratic schedule.
        #[arg(long, conflicts_with = "power")]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        t0: f64,
        #[arg(long, default_value_t = 1000.0)]
        t_end: f64,
        /// Number of log-spaced sample times (endpoints included).
        #[arg(long, default_value_t = 256)]
        points: usize,
    },
    /// Randomized property audit of the built-in operator catalog.
    /// Exits nonzero if any property fails.
    Audit {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Random draws per operator/property pair.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Seed of the sample stream; echoed into the CSV.
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    process::exit(code);
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config, out, rtol, atol, dt, iters } => {
            let ov = Overrides { rtol, atol, dt, iters };
            let summary = commands::cmd_run(&config, &out, &ov)?;
            println!(
                "wrote {} and {}",
                summary.trajectory_path.display(),
                summary.diagnostics_path.display()
            );
            if summary.diverged {
                println!("run diverged; final norm {:.6e}", summary.final_norm);
            } else {
                println!("final norm {:.6e}", summary.final_norm);
            }
            Ok(0)
        }
        Command::Table1 { out, rtol, atol, dt } => {
            let ov = Overrides { rtol, atol, dt, iters: None };
            let outcome = commands::cmd_table1(&out, &ov)?;
            print!("{}", outcome.text);
            println!(
                "\nwrote {} and {}",
                outcome.csv_path.display(),
                outcome.text_path.display()
            );
            Ok(if outcome.all_within { 0 } else { 1 })
        }
        Command::Sweep { config, out } => {
            let outcome = commands::cmd_sweep(&config, &out)?;
            println!(
                "{} cells ({} failed) -> {}",
                outcome.cells,
                outcome.failed_cells,
                outcome.csv_path.display()
            );
            Ok(0)
        }
        Command::Spectra { out, alpha, epsilon, power, lambda, t0, t_end, points } => {
            let args = SpectraArgs { alpha, epsilon, power, lambda, t0, t_end, points };
            let path = commands::cmd_spectra(&args, &out)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Audit { out, samples, seed } => {
            let outcome = commands::cmd_audit(samples, seed, &out)?;
            print!("{}", outcome.text);
            println!("wrote {}", outcome.csv_path.display());
            Ok(if outcome.all_passed { 0 } else { 1 })
        }
    }
}
