use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hessdamp_harness::config::ExperimentConfig;
use hessdamp_harness::error::{HarnessError, Result};
use hessdamp_harness::output::read_csv;
use hessdamp_harness::rate::{rate_fit, RateMode};
use hessdamp_harness::reproduce::{reproduce, Target};
use hessdamp_harness::run::{run, validate};

/// Runs and reproduces Hessian-damped inertial optimization experiments.
#[derive(Parser)]
#[command(name = "hessdamp", version)]
struct Cli {
    /// Output directory (overridden by HESSDAMP_OUT).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Run a pinned reproduction target, or `all`.
    Reproduce { target: String },
    /// Check a config's hypotheses without running it.
    Validate { config: PathBuf },
    /// Fit a convergence rate to the f_gap column of a trace CSV.
    Rate {
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Poly)]
        mode: Mode,
        /// Abscissa window `a:b` (index for discrete traces, time otherwise).
        #[arg(long)]
        window: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Poly,
    Linear,
}

fn out_dir(cli: &Path) -> PathBuf {
    std::env::var_os("HESSDAMP_OUT").map(PathBuf::from).unwrap_or_else(|| cli.to_path_buf())
}

fn parse_window(text: &str) -> Result<(f64, f64)> {
    let bad = || HarnessError::Parse(format!("window must look like a:b, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn execute(cli: Cli) -> Result<()> {
    let out = out_dir(&cli.out);
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let outcome = run(&cfg, &out)?;
            println!("{}", serde_json::to_string_pretty(&outcome.report).expect("report serializes"));
        }
        Command::Reproduce { target } => {
            let targets = if target == "all" { Target::ALL.to_vec() } else { vec![target.parse()?] };
            for t in targets {
                let report = reproduce(t, &out)?;
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            }
        }
        Command::Validate { config } => {
            validate(&ExperimentConfig::load(&config)?)?;
            println!("ok");
        }
        Command::Rate { trace, mode, window } => {
            let rows = read_csv(&trace)?;
            let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.f_gap)).collect();
            let mode = match mode {
                Mode::Poly => RateMode::Poly,
                Mode::Linear => RateMode::Linear,
            };
            let report = rate_fit(&points, parse_window(&window)?, mode)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
