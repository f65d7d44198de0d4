use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spin_anneal_cli::{dispatch, load_config, preset_config, preset_listing, CliError, Command, RunConfig};

/// Quantum annealing simulator for spin-1/2 Heisenberg chains.
#[derive(Debug, Parser)]
#[command(name = "spin-anneal", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Anneal from the driver ground state; writes trajectory.csv and report.json.
    Anneal(RunArgs),
    /// Instantaneous spectra over the schedule; writes spectrum.csv.
    Spectrum(RunArgs),
    /// Exact diagonalization of the final Hamiltonian; writes ground.json.
    Ground(RunArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run configuration.
    config: Option<PathBuf>,
    /// Use a built-in preset instead of (or on top of) a config file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; overrides `out_dir` from the config.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Print one line per trajectory sample to stderr.
    #[arg(long, short)]
    verbose: bool,
}

fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), preset) => load_config(path, preset.as_deref())?,
        (None, Some(name)) => preset_config(name)?,
        (None, None) => return Err(CliError::Config("either a config file or --preset is required".into())),
    };
    if let Some(dir) = &args.out_dir {
        cfg.out_dir = dir.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, args) = match cli.command {
        Cmd::Anneal(a) => (Command::Anneal, a),
        Cmd::Spectrum(a) => (Command::Spectrum, a),
        Cmd::Ground(a) => (Command::Ground, a),
        Cmd::Presets => {
            print!("{}", preset_listing());
            return Ok(());
        }
    };
    let cfg = resolve(&args)?;
    for path in dispatch(command, &cfg, args.verbose)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
