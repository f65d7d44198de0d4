//! Command dispatch for the `spin-anneal` binary.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use spin_anneal::analysis::{dominant_states, total_spin_expectations, FrustrationReport};
use spin_anneal::experiments::{preset_description, run_config_observed, DominantEntry, PRESET_NAMES};
use spin_anneal::operators::{build_total_spin_squared, Bond};
use spin_anneal::spectrum::{eigen_decompose, ground_space_from, spectrum_series, uniform_grid};
use spin_anneal::{Error, StateVector};
use thiserror::Error as ThisError;

pub mod config;
pub mod output;

pub use config::{load_config, parse_config, parse_config_with, preset_config, RunConfig};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NormDrift { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Anneal,
    Spectrum,
    Ground,
    Presets,
}

/// Exact diagonalization summary of the final Hamiltonian.
#[derive(Debug, Serialize)]
pub struct GroundReport {
    pub preset: Option<String>,
    pub n_spins: usize,
    pub bonds: Vec<Bond>,
    pub b0: f64,
    pub ground_energy: f64,
    pub degeneracy: usize,
    pub degeneracy_tol: f64,
    pub gap_1_2: Option<f64>,
    pub gap_2_3: Option<f64>,
    /// All final levels, ascending.
    pub levels: Vec<f64>,
    /// Of the first ground-space vector.
    pub dominant_states: Vec<DominantEntry>,
    pub s_squared: f64,
    pub s_z: f64,
    pub frustration: Option<FrustrationReport>,
}

pub fn ground_report(cfg: &RunConfig) -> Result<GroundReport, CliError> {
    let anneal = &cfg.anneal;
    let ah = anneal.hamiltonian()?;
    let decomposition = eigen_decompose(ah.h_final())?;
    let gs = ground_space_from(&decomposition, anneal.degeneracy_tol)?;
    let levels = decomposition.eigenvalues.clone();
    let ground = StateVector::normalize(
        gs.basis[0].iter().map(|&x| num_complex::Complex64::new(x, 0.0)).collect(),
    )?;
    let n = anneal.n_spins();
    let (s_squared, s_z) = total_spin_expectations(&ground, &build_total_spin_squared(n)?, n)?;
    Ok(GroundReport {
        preset: cfg.preset.clone(),
        n_spins: n,
        bonds: anneal.graph.bonds().to_vec(),
        b0: anneal.fields.b0,
        ground_energy: gs.energy,
        degeneracy: gs.degeneracy(),
        degeneracy_tol: gs.degeneracy_tol,
        gap_1_2: (levels.len() > 1).then(|| levels[1] - levels[0]),
        gap_2_3: (levels.len() > 2).then(|| levels[2] - levels[1]),
        dominant_states: dominant_states(&ground, anneal.dominant_threshold)?
            .into_iter()
            .map(|d| DominantEntry {
                index: d.index,
                pattern: d.pattern.to_string(),
                amplitude: d.amplitude.into(),
                probability: d.probability,
            })
            .collect(),
        s_squared,
        s_z,
        frustration: anneal.frustration(),
        levels,
    })
}

/// Preset names with descriptions, one per line.
pub fn preset_listing() -> String {
    PRESET_NAMES
        .iter()
        .map(|n| format!("{n:<14}{}\n", preset_description(n).unwrap_or_default()))
        .collect()
}

/// Runs `command`, returning the files written.
pub fn dispatch(command: Command, cfg: &RunConfig, verbose: bool) -> Result<Vec<PathBuf>, CliError> {
    let dir = &cfg.out_dir;
    match command {
        Command::Presets => {
            print!("{}", preset_listing());
            Ok(Vec::new())
        }
        Command::Anneal => {
            output::ensure_dir(dir)?;
            let stderr = std::io::stderr();
            let report = run_config_observed(&cfg.anneal, |s| {
                if verbose {
                    let _ = writeln!(stderr.lock(), "sample {:>5}  t = {:<12} norm = {}", s.index, s.time, s.norm);
                }
            })?;
            let mut report = report;
            report.preset = cfg.preset.clone();
            let traj = output::write_csv(dir, "trajectory.csv", &output::trajectory_csv(&report.trajectory))?;
            let json = output::write_json(dir, "report.json", &report)?;
            Ok(vec![traj, json])
        }
        Command::Spectrum => {
            output::ensure_dir(dir)?;
            let ah = cfg.anneal.hamiltonian()?;
            let series = spectrum_series(&ah, &uniform_grid(cfg.spectrum_points))?;
            Ok(vec![output::write_csv(dir, "spectrum.csv", &output::spectrum_csv(&series))?])
        }
        Command::Ground => {
            output::ensure_dir(dir)?;
            let report = ground_report(cfg)?;
            Ok(vec![output::write_json(dir, "ground.json", &report)?])
        }
    }
}
