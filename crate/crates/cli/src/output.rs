//! CSV and JSON emitters.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spin_anneal::spectrum::SpectrumSeries;
use spin_anneal::Trajectory;

use crate::CliError;

/// `%g`-style decimal with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

/// `t, p_<n>..., norm`, one row per sample.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t");
    for i in &traj.tracked {
        write!(out, ",p_{i}").unwrap();
    }
    out.push_str(",norm\n");
    for ((t, probs), norm) in traj.times.iter().zip(&traj.probabilities).zip(&traj.norms) {
        out.push_str(&format_sig(*t));
        for p in probs {
            out.push(',');
            out.push_str(&format_sig(*p));
        }
        out.push(',');
        out.push_str(&format_sig(*norm));
        out.push('\n');
    }
    out
}

/// `s, E_1..E_D`, ascending levels per row.
pub fn spectrum_csv(series: &SpectrumSeries) -> String {
    let width = series.levels.first().map_or(0, Vec::len);
    let mut out = String::from("s");
    for i in 1..=width {
        write!(out, ",E_{i}").unwrap();
    }
    out.push('\n');
    for (s, levels) in series.s_grid.iter().zip(&series.levels) {
        out.push_str(&format_sig(*s));
        for e in levels {
            out.push(',');
            out.push_str(&format_sig(*e));
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    write_file(&path, contents)?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    write_file(&path, &text)?;
    Ok(path)
}
