use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dfo_core::harness::{self, presets, ExperimentConfig};
use dfo_core::{Error, Result};

/// DF / DFO time integration of parametrized PDE solutions.
#[derive(Parser)]
#[command(name = "dfo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one experiment and write metrics.csv and theta.txt.
    Run {
        /// Experiment file (TOML).
        #[arg(required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Run a shipped preset instead of a file.
        #[arg(long)]
        preset: Option<String>,
        /// Override the output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run several experiments on the same problem and merge their error curves.
    Compare {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Merged CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the initial condition only and write theta0.txt.
    Fit { config: PathBuf },
    /// Shipped experiment configurations.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names.
    List,
    /// Print a preset as TOML.
    Show { name: String },
}

fn load(config: Option<PathBuf>, preset: Option<String>) -> Result<ExperimentConfig> {
    match (config, preset) {
        (Some(path), _) => ExperimentConfig::load(&path),
        (None, Some(name)) => {
            let mut cfg = presets::get(&name)?;
            cfg.apply_seed_env()?;
            cfg.validate()?;
            Ok(cfg)
        }
        (None, None) => Err(Error::Config("no configuration given".into())),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            preset,
            out_dir,
        } => {
            let mut cfg = load(config, preset)?;
            if out_dir.is_some() {
                cfg.output.dir = out_dir;
            }
            let out = harness::run(&cfg)?;
            let sim = &out.simulation;
            if let Some(last) = sim.metrics.last() {
                eprintln!(
                    "{}: {} steps, t = {}, rel_l2_error = {:e}",
                    cfg.name,
                    sim.trajectory.records.len(),
                    last.t,
                    last.rel_l2_error
                );
            }
            println!("{}", out.metrics.display());
            println!("{}", out.theta.display());
        }
        Command::Compare { configs, out } => match out {
            Some(path) => {
                harness::run::compare_to_file(&configs, &path)?;
                println!("{}", path.display());
            }
            None => print!("{}", harness::compare(&configs)?),
        },
        Command::Fit { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (path, outcome) = harness::run_fit(&cfg)?;
            eprintln!("{}: loss {:e} after {} iterations", cfg.name, outcome.loss, outcome.iterations);
            println!("{}", path.display());
        }
        Command::Presets { action } => match action {
            PresetAction::List => {
                for name in presets::names() {
                    println!("{name:<26}{}", presets::describe(name));
                }
            }
            PresetAction::Show { name } => print!("{}", presets::get(&name)?.to_toml()?),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
