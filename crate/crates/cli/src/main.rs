use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use osc_cli::{compare_oracle, presets, run, Config, RunOptions};
use osc_core::QuadratureConfig;

/// Driven, damped coupled oscillators: figure data and oracle checks.
#[derive(Parser)]
#[command(name = "oscsim", version)]
struct Cli {
    /// Quadrature tolerance for run/preset; acceptance tolerance for
    /// compare-oracle.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grid points per axis for phase-space scenarios.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario in a config file.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run one of the built-in figure presets.
    Preset {
        #[arg(value_parser = presets::NAMES)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare closed forms against the mode-equation oracle; exits
    /// nonzero if any deviation exceeds the tolerance.
    CompareOracle { config: PathBuf },
}

fn options(cli: &Cli) -> Result<RunOptions> {
    if let Some(n) = cli.grid {
        anyhow::ensure!(n >= 2, "--grid must be at least 2");
    }
    let mut opts = RunOptions { grid: cli.grid, ..RunOptions::default() };
    if let (Some(tol), Command::Run { .. } | Command::Preset { .. }) = (cli.tol, &cli.command) {
        anyhow::ensure!(tol > 0.0, "--tol must be positive");
        opts.quadrature = QuadratureConfig::with_tolerance(tol);
    }
    Ok(opts)
}

fn execute(cli: &Cli) -> Result<ExitCode> {
    let opts = options(cli)?;
    match &cli.command {
        Command::Run { config, out } => {
            let cfg = Config::load(config)?;
            for path in run(&cfg, out, &opts)? {
                println!("{}", path.display());
            }
        }
        Command::Preset { name, out } => {
            let cfg = presets::load(name)?;
            for path in run(&cfg, out, &opts)? {
                println!("{}", path.display());
            }
        }
        Command::CompareOracle { config } => {
            let cfg = Config::load(config)?;
            let tol = cli.tol.unwrap_or(1e-8);
            let report = compare_oracle(&cfg, &opts, tol)?;
            anyhow::ensure!(!report.is_empty(), "no scenario in {} has an oracle counterpart", config.display());
            let mut ok = true;
            for c in &report {
                let status = if c.passed() { "ok" } else { "FAIL" };
                ok &= c.passed();
                println!(
                    "{status:4} {} [{}]: max |Δ| = {:.3e} at kt = {:.4} over {} points (tol {:.1e})",
                    c.scenario, c.variant, c.max_deviation, c.worst_time, c.points, c.tolerance
                );
            }
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build().context("starting worker threads") {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
