//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use spin_anneal::experiments::{preset, AnnealConfig, DEFAULT_TAU};
use spin_anneal::operators::{Bond, CouplingGraph, FieldParams};
use spin_anneal::propagator::{IntegratorConfig, Track};
use spin_anneal::spectrum::DEFAULT_SPECTRUM_POINTS;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TrackSpec {
    Keyword(String),
    Indices(Vec<usize>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n_spins: Option<usize>,
    couplings: Option<Vec<(usize, usize, f64)>>,
    b0: Option<f64>,
    b_prime: Option<f64>,
    tau: Option<f64>,
    dt: Option<f64>,
    samples: Option<usize>,
    track: Option<TrackSpec>,
    preset: Option<String>,
    degeneracy_tol: Option<f64>,
    spectrum_points: Option<usize>,
    out_dir: Option<PathBuf>,
}

/// Validated run configuration with defaults applied.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub anneal: AnnealConfig,
    pub spectrum_points: usize,
    pub out_dir: PathBuf,
}

/// 1-based line of the first `"key"` occurrence in `text`.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

struct Validator<'a> {
    text: &'a str,
}

impl Validator<'_> {
    fn fail(&self, field: &str, message: impl std::fmt::Display) -> CliError {
        let location = line_of_key(self.text, field.split(['[', '.']).next().unwrap_or(field))
            .map(|l| format!("line {l}: "))
            .unwrap_or_default();
        CliError::Config(format!("{location}{field}: {message}"))
    }
}

pub fn load_config(path: &Path, preset_override: Option<&str>) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_config_with(&text, preset_override)
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_with(text, None)
}

/// Parses `text` (JSON); `preset_override` acts like a `"preset"` entry.
pub fn parse_config_with(text: &str, preset_override: Option<&str>) -> Result<RunConfig, CliError> {
    let mut raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    if let Some(name) = preset_override {
        raw.preset = Some(name.to_string());
    }
    build(raw, &Validator { text })
}

/// Config for a bare `--preset` invocation.
pub fn preset_config(name: &str) -> Result<RunConfig, CliError> {
    build(RawConfig { preset: Some(name.to_string()), ..Default::default() }, &Validator { text: "" })
}

fn build(raw: RawConfig, v: &Validator<'_>) -> Result<RunConfig, CliError> {
    let mut anneal = match &raw.preset {
        Some(name) => {
            let physics = [
                ("n_spins", raw.n_spins.is_some()),
                ("couplings", raw.couplings.is_some()),
                ("b0", raw.b0.is_some()),
                ("b_prime", raw.b_prime.is_some()),
                ("tau", raw.tau.is_some()),
            ];
            if let Some((field, _)) = physics.iter().find(|(_, set)| *set) {
                return Err(v.fail(field, "cannot be combined with a preset"));
            }
            preset(name).map_err(|e| v.fail("preset", e))?.config
        }
        None => explicit(&raw, v)?,
    };

    let mut integrator = IntegratorConfig::default();
    if let Some(dt) = raw.dt {
        integrator.dt = dt;
    }
    if let Some(samples) = raw.samples {
        integrator.n_samples = samples;
    }
    let dim = 1usize << anneal.n_spins();
    integrator.track = match raw.track {
        None => Track::Auto,
        Some(TrackSpec::Keyword(k)) if k == "all" => Track::All,
        Some(TrackSpec::Keyword(k)) if k == "auto" => Track::Auto,
        Some(TrackSpec::Keyword(k)) => {
            return Err(v.fail("track", format!("expected \"all\", \"auto\" or an index list, got \"{k}\"")))
        }
        Some(TrackSpec::Indices(idx)) => {
            if let Some(bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(v.fail("track", format!("index {bad} outside 0..{dim}")));
            }
            Track::Indices(idx)
        }
    };
    if !(integrator.dt > 0.0) || !integrator.dt.is_finite() {
        return Err(v.fail("dt", format!("must be positive, got {}", integrator.dt)));
    }
    if integrator.n_samples < 2 {
        return Err(v.fail("samples", format!("must be >= 2, got {}", integrator.n_samples)));
    }
    anneal.integrator = integrator;

    if let Some(tol) = raw.degeneracy_tol {
        if !(tol >= 0.0) {
            return Err(v.fail("degeneracy_tol", format!("must be >= 0, got {tol}")));
        }
        anneal.degeneracy_tol = tol;
    }
    let spectrum_points = raw.spectrum_points.unwrap_or(DEFAULT_SPECTRUM_POINTS);
    if spectrum_points < 1 {
        return Err(v.fail("spectrum_points", "must be >= 1"));
    }
    anneal.validate().map_err(|e| v.fail("config", e))?;

    Ok(RunConfig {
        preset: raw.preset,
        anneal,
        spectrum_points,
        out_dir: raw.out_dir.unwrap_or_else(|| PathBuf::from(".")),
    })
}

fn explicit(raw: &RawConfig, v: &Validator<'_>) -> Result<AnnealConfig, CliError> {
    let n_spins = raw.n_spins.ok_or_else(|| v.fail("n_spins", "required unless a preset is given"))?;
    let couplings = raw.couplings.as_deref().unwrap_or_default();
    let bonds: Vec<Bond> = couplings.iter().map(|&(k, m, j)| Bond::new(k, m, j)).collect();
    for (i, b) in bonds.iter().enumerate() {
        // name the offending entry before the graph-level checks run
        CouplingGraph::new(n_spins, vec![*b]).map_err(|e| match e {
            spin_anneal::Error::Config(msg) if n_spins >= 1 && n_spins <= spin_anneal::basis::MAX_SPINS => {
                v.fail(&format!("couplings[{i}]"), msg.trim_start_matches("bond 0: "))
            }
            other => v.fail("n_spins", other),
        })?;
    }
    let graph = CouplingGraph::new(n_spins, bonds).map_err(|e| v.fail("couplings", e))?;
    let b0 = raw.b0.unwrap_or(1.0);
    let b_prime = raw.b_prime.unwrap_or(FieldParams::default().b_prime);
    let fields = FieldParams::new(b0, b_prime).map_err(|e| {
        let field = if !(b0 >= 0.0) || !b0.is_finite() { "b0" } else { "b_prime" };
        v.fail(field, e)
    })?;
    let tau = raw.tau.unwrap_or(DEFAULT_TAU);
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(v.fail("tau", format!("must be positive, got {tau}")));
    }
    AnnealConfig::new(graph, fields, tau).map_err(|e| v.fail("config", e))
}
