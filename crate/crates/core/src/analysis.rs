//! Observables extracted from annealed states.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{index_to_spins, twice_sz, SpinBasis, SpinConfiguration};
use crate::error::{Error, Result};
use crate::operators::{Bond, SparseHermitian};
use crate::spectrum::GroundSpace;
use crate::state::StateVector;

/// Amplitudes below this modulus carry no meaningful phase.
pub const PHASE_CUTOFF: f64 = 1e-6;
/// Moduli within this relative distance of the largest count as tied when
/// fixing the global phase.
pub const PHASE_TIE_REL_TOL: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct DominantState {
    pub index: usize,
    pub probability: f64,
    /// After global phase fixing.
    pub amplitude: Complex64,
    pub pattern: SpinConfiguration,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrustrationReport {
    pub cycle: Vec<Bond>,
    pub negative_count: usize,
    pub frustrated: bool,
}

pub fn probabilities(state: &StateVector) -> Vec<f64> {
    state.amplitudes().iter().map(|c| c.norm_sqr()).collect()
}

/// Index of the largest-modulus amplitude; ties go to the lowest index.
fn reference_index(amps: &[Complex64]) -> usize {
    let max = amps.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = max * (1.0 - PHASE_TIE_REL_TOL);
    amps.iter().position(|c| c.norm() >= floor).unwrap_or(0)
}

/// Rotates the state so its largest amplitude (lowest index among ties) is
/// real and positive.
pub fn fix_global_phase(state: &StateVector) -> Result<StateVector> {
    let amps = state.amplitudes();
    let r = reference_index(amps);
    let m = amps[r].norm();
    if !(m > 0.0) {
        return Err(Error::Contract("cannot fix the phase of a zero vector".into()));
    }
    Ok(state.scaled(amps[r].conj() / m))
}

/// Basis states with `p_n ≥ threshold`, most probable first (lower index on ties).
pub fn dominant_states(state: &StateVector, threshold: f64) -> Result<Vec<DominantState>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Range(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let fixed = fix_global_phase(state)?;
    let basis = SpinBasis::new(state.dimension().trailing_zeros() as usize)?;
    let mut out: Vec<DominantState> = fixed
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() >= threshold)
        .map(|(index, &amplitude)| {
            Ok(DominantState {
                index,
                probability: amplitude.norm_sqr(),
                amplitude,
                pattern: index_to_spins(index, &basis)?,
            })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| b.probability.total_cmp(&a.probability).then(a.index.cmp(&b.index)));
    Ok(out)
}

/// `arg(C_j) − arg(C_i)` wrapped to (−π, π].
pub fn relative_phase(state: &StateVector, i: usize, j: usize) -> Result<f64> {
    let dim = state.dimension();
    for idx in [i, j] {
        if idx >= dim {
            return Err(Error::Range(format!("basis index {idx} outside 0..{dim}")));
        }
        let modulus = state.amplitude(idx).norm();
        if modulus <= PHASE_CUTOFF {
            return Err(Error::UndefinedPhase { index: idx, modulus });
        }
    }
    let phase = (state.amplitude(j) * state.amplitude(i).conj()).arg();
    Ok(if phase <= -PI { phase + 2.0 * PI } else { phase })
}

/// Squared norm of the projection onto `span(gs.basis)`.
pub fn fidelity_to_subspace(state: &StateVector, gs: &GroundSpace) -> Result<f64> {
    let amps = state.amplitudes();
    let mut total = 0.0;
    for v in &gs.basis {
        if v.len() != amps.len() {
            return Err(Error::Contract(format!(
                "subspace vector of length {} against state of dimension {}",
                v.len(),
                amps.len()
            )));
        }
        let proj: Complex64 = v.iter().zip(amps).map(|(&b, &c)| c * b).sum();
        total += proj.norm_sqr();
    }
    Ok(total.clamp(0.0, 1.0))
}

/// `(⟨S²⟩, ⟨S^z⟩)`.
pub fn total_spin_expectations(state: &StateVector, s2: &SparseHermitian, n_spins: usize) -> Result<(f64, f64)> {
    if state.dimension() != 1 << n_spins {
        return Err(Error::Contract(format!(
            "state of dimension {} for {n_spins} spins",
            state.dimension()
        )));
    }
    let s_sq = s2.expectation(state.amplitudes())?;
    let sz = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm_sqr() * 0.5 * twice_sz(i, n_spins) as f64)
        .sum();
    Ok((s_sq, sz))
}

/// Counts negative bonds around a closed cycle; odd means frustrated.
pub fn frustration_parity(cycle: &[Bond]) -> Result<FrustrationReport> {
    check_cycle(cycle)?;
    let negative_count = cycle.iter().filter(|b| b.j < 0.0).count();
    Ok(FrustrationReport {
        cycle: cycle.to_vec(),
        negative_count,
        frustrated: negative_count % 2 == 1,
    })
}

/// Every spin has exactly two bonds and all bonds form one connected loop.
fn check_cycle(cycle: &[Bond]) -> Result<()> {
    if cycle.len() < 3 {
        return Err(Error::Config(format!("a cycle needs at least 3 bonds, got {}", cycle.len())));
    }
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for b in cycle {
        if b.k == b.m {
            return Err(Error::Config(format!("self-bond on spin {}", b.k)));
        }
        *degree.entry(b.k).or_default() += 1;
        *degree.entry(b.m).or_default() += 1;
    }
    if let Some((spin, d)) = degree.iter().find(|(_, &d)| d != 2) {
        return Err(Error::Config(format!("bonds do not form a cycle: spin {spin} has {d} bonds")));
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![cycle[0].k];
    while let Some(s) = stack.pop() {
        if seen.insert(s) {
            stack.extend(cycle.iter().filter(|b| b.touches(s)).map(|b| if b.k == s { b.m } else { b.k }));
        }
    }
    if seen.len() != degree.len() {
        return Err(Error::Config("bonds form more than one cycle".into()));
    }
    Ok(())
}
