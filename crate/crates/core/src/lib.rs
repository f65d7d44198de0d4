//! Quantum annealing of spin-1/2 Heisenberg chains.
//!
//! The anneal interpolates linearly from a staggered transverse-field driver,
//! `b' Σ_k (−1)^{k+1} S^x_k`, to the isotropic exchange + Zeeman Hamiltonian
//! `−4 Σ J_km S_k·S_m + b0 Σ_k S^z_k`, starting from the driver's product
//! ground state. Energies are in units of `γħB0` and times in `1/(γħB0)`.
//!
//! With the default `parallel` feature, sparse products on large chains,
//! spectrum sweeps, and batches of independent runs use rayon; every such
//! entry point also accepts [`Exec::Sequential`].

pub mod analysis;
pub mod basis;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod operators;
pub mod propagator;
pub mod schedule;
pub mod spectrum;
pub mod state;

pub use error::{Error, Result};
pub use exec::Exec;
pub use experiments::{preset, run_preset, AnnealConfig, AnnealReport, ExperimentPreset, PRESET_NAMES};
pub use operators::{Bond, CouplingGraph, FieldParams, SparseHermitian};
pub use propagator::{evolve, IntegratorConfig, Track, Trajectory};
pub use schedule::{AnnealHamiltonian, AnnealSchedule};
pub use state::StateVector;
