use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fssc::data::{generate_synthetic, save_labels, save_matrix};
use fssc_cli::config::{format_for, synthetic_spec, RunConfig, Settings, SweepConfig};
use fssc_cli::report::{describe, run_csv, sweep_csv};
use fssc_cli::runner::{run_repeated, run_sweep};

#[derive(Parser)]
#[command(
    name = "fssc",
    version,
    about = "Closed-form subspace clustering benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one dataset, repeated with derived seeds, and report scores
    Run(Common),
    /// Evaluate every (tau, k) pair of a grid
    Sweep(Common),
    /// Write a synthetic union-of-subspaces dataset to files
    Gen(Common),
}

#[derive(Args)]
struct Common {
    /// JSON file with default settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,
}

impl Common {
    fn resolve(self) -> Result<Settings> {
        Ok(match &self.config {
            Some(path) => self.settings.layered_over(Settings::from_json_file(path)?),
            None => self.settings,
        })
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing report {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(settings: Settings) -> Result<()> {
    let config = RunConfig::from_settings(&settings)?;
    let result = run_repeated(&config)?;
    if config.out.is_some() {
        eprintln!("{}", describe(&config, &result));
    }
    write_output(config.out.as_deref(), &run_csv(&config, &result))
}

fn sweep(settings: Settings) -> Result<()> {
    let config = SweepConfig::from_settings(&settings)?;
    let rows = run_sweep(&config)?;
    write_output(config.base.out.as_deref(), &sweep_csv(&config.base, &rows))
}

fn gen(settings: Settings) -> Result<()> {
    let Some(out) = settings.out.as_deref() else {
        bail!("gen requires --out <matrix file>");
    };
    let Some(labels) = settings.labels.as_deref() else {
        bail!("gen requires --labels <label file>");
    };
    let data = generate_synthetic(&synthetic_spec(&settings)).context("load stage failed")?;
    save_matrix(out, &data.matrix, format_for(out, settings.format))
        .with_context(|| format!("writing {}", out.display()))?;
    save_labels(labels, &data.truth).with_context(|| format!("writing {}", labels.display()))?;
    eprintln!(
        "wrote {} ({}x{}) and {}",
        out.display(),
        data.matrix.nrows(),
        data.matrix.ncols(),
        labels.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(c) => c.resolve().and_then(run),
        Command::Sweep(c) => c.resolve().and_then(sweep),
        Command::Gen(c) => c.resolve().and_then(gen),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
