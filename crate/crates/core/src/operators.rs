//! Sparse real-symmetric matrices for the annealing Hamiltonians.
//!
//! Units: energies in `γħB0`, so the uniform field `b0` is a plain multiplier
//! (normally 1) and `S^z`, `S^x` carry their spin-1/2 matrix elements.
//! Every term is real in the `S^z` product basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{flip_mask, spin_bit, twice_sz, SpinBasis};
use crate::error::{Error, Result};
use crate::exec::{self, Exec, PAR_MIN_ROWS};
use crate::state::inner;

/// Exchange bond `J_km` between spins `k < m` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bond {
    pub k: usize,
    pub m: usize,
    pub j: f64,
}

impl Bond {
    pub fn new(k: usize, m: usize, j: f64) -> Self {
        Self { k, m, j }
    }

    pub fn touches(&self, spin: usize) -> bool {
        self.k == spin || self.m == spin
    }
}

/// Exchange couplings over an `n_spins` chain. Each unordered pair is stored
/// once with `k < m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingGraph {
    n_spins: usize,
    bonds: Vec<Bond>,
}

impl CouplingGraph {
    /// Validates and canonicalizes bonds. `(m, k, J)` with `m > k` is accepted
    /// and stored as `(k, m, J)`.
    pub fn new(n_spins: usize, bonds: Vec<Bond>) -> Result<Self> {
        SpinBasis::new(n_spins)?;
        let mut canonical: Vec<Bond> = Vec::with_capacity(bonds.len());
        for (i, b) in bonds.into_iter().enumerate() {
            for spin in [b.k, b.m] {
                if spin == 0 {
                    return Err(Error::Config(format!("bond {i}: spin indices are 1-based, got 0")));
                }
                if spin > n_spins {
                    return Err(Error::Config(format!(
                        "bond {i}: bond spin {spin} exceeds n_spins {n_spins}"
                    )));
                }
            }
            if b.k == b.m {
                return Err(Error::Config(format!("bond {i}: self-coupling of spin {}", b.k)));
            }
            if !b.j.is_finite() || b.j == 0.0 {
                return Err(Error::Config(format!(
                    "bond {i}: exchange constant must be finite and nonzero, got {}",
                    b.j
                )));
            }
            let (k, m) = if b.k < b.m { (b.k, b.m) } else { (b.m, b.k) };
            if canonical.iter().any(|c| c.k == k && c.m == m) {
                return Err(Error::Config(format!("bond {i}: duplicate pair ({k}, {m})")));
            }
            canonical.push(Bond { k, m, j: b.j });
        }
        Ok(Self { n_spins, bonds: canonical })
    }

    /// Closed ring `1-2-...-N-1` with `J_{k,k+1} = js[k-1]` and the closing
    /// bond `(1, N)` taking the last entry.
    pub fn ring(js: &[f64]) -> Result<Self> {
        let n = js.len();
        if n < 3 {
            return Err(Error::Config(format!("a ring needs at least 3 spins, got {n}")));
        }
        let bonds = (1..=n)
            .map(|k| Bond::new(k, if k == n { 1 } else { k + 1 }, js[k - 1]))
            .collect();
        Self::new(n, bonds)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    /// Same bonds with every exchange constant multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.n_spins,
            self.bonds.iter().map(|b| Bond { j: b.j * factor, ..*b }).collect(),
        )
    }
}

/// Uniform z-field `b0` and staggered x-field magnitude `b_prime`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub b0: f64,
    pub b_prime: f64,
}

impl FieldParams {
    pub fn new(b0: f64, b_prime: f64) -> Result<Self> {
        for (name, v) in [("b0", b0), ("b_prime", b_prime)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { b0, b_prime })
    }
}

impl Default for FieldParams {
    fn default() -> Self {
        Self { b0: 1.0, b_prime: 20.0 }
    }
}

/// Real symmetric matrix in compressed-row form. Columns within a row are
/// strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHermitian {
    dimension: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseHermitian {
    /// Assembles a matrix row by row. `row_entries(i, &mut buf)` pushes
    /// `(column, value)` pairs for row `i`; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_rows<F>(dimension: usize, mut row_entries: F) -> Self
    where
        F: FnMut(usize, &mut Vec<(usize, f64)>),
    {
        let mut row_ptr = Vec::with_capacity(dimension + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        let mut buf = Vec::new();
        row_ptr.push(0);
        for i in 0..dimension {
            buf.clear();
            row_entries(i, &mut buf);
            buf.sort_unstable_by_key(|&(c, _)| c);
            let mut idx = 0;
            while idx < buf.len() {
                let col = buf[idx].0;
                let mut acc = 0.0;
                while idx < buf.len() && buf[idx].0 == col {
                    acc += buf[idx].1;
                    idx += 1;
                }
                if acc != 0.0 {
                    debug_assert!(col < dimension);
                    cols.push(col);
                    values.push(acc);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { dimension, row_ptr, cols, values }
    }

    pub fn zeros(dimension: usize) -> Self {
        Self::from_rows(dimension, |_, _| {})
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column, value)` pairs stored in row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dimension).map(|i| self.get(i, i)).sum()
    }

    /// Induced infinity norm, `max_i Σ_j |H_ij|`.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.dimension)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Full scan: every stored `(i, j, v)` has a stored mirror `(j, i, v)`.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dimension).all(|i| {
            self.row(i).all(|(j, v)| {
                let span = self.row_ptr[j]..self.row_ptr[j + 1];
                matches!(self.cols[span.clone()].binary_search(&i),
                         Ok(pos) if self.values[span.start + pos] == v)
            })
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dimension, self.dimension);
        self.add_to_dense(1.0, &mut m);
        m
    }

    /// `dense += factor * self`.
    pub fn add_to_dense(&self, factor: f64, dense: &mut DMatrix<f64>) {
        for i in 0..self.dimension {
            for (j, v) in self.row(i) {
                dense[(i, j)] += factor * v;
            }
        }
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dimension {
            return Err(Error::Contract(format!(
                "vector of length {len} applied to matrix of dimension {}",
                self.dimension
            )));
        }
        Ok(())
    }

    /// `H·v` as a new vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dimension];
        self.apply_into(v, &mut out, Exec::default())?;
        Ok(out)
    }

    /// `out = H·v`.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64], exec: Exec) -> Result<()> {
        self.check_dim(v.len())?;
        self.check_dim(out.len())?;
        exec::for_each_chunk(exec, out, PAR_MIN_ROWS, |offset, chunk| {
            for (r, o) in chunk.iter_mut().enumerate() {
                *o = self.row(offset + r).map(|(j, h)| v[j] * h).sum();
            }
        });
        Ok(())
    }

    /// `⟨v|H|v⟩`, real for symmetric `H`.
    pub fn expectation(&self, v: &[Complex64]) -> Result<f64> {
        let hv = self.apply(v)?;
        Ok(inner(v, &hv).re)
    }
}

/// `−4 Σ_bonds J_km S_k·S_m + b0 Σ_k S^z_k`.
pub fn build_exchange_zeeman(graph: &CouplingGraph, b0: f64) -> SparseHermitian {
    let n = graph.n_spins();
    let bonds = graph.bonds();
    SparseHermitian::from_rows(1 << n, |i, row| {
        let mut diag = 0.5 * b0 * twice_sz(i, n) as f64;
        for b in bonds {
            if spin_bit(i, n, b.k) == spin_bit(i, n, b.m) {
                diag -= b.j;
            } else {
                diag += b.j;
                row.push((i ^ flip_mask(n, b.k) ^ flip_mask(n, b.m), -2.0 * b.j));
            }
        }
        row.push((i, diag));
    })
}

/// `b_prime Σ_k (−1)^{k+1} S^x_k`, without the schedule factor.
pub fn build_staggered_driver(n_spins: usize, b_prime: f64) -> Result<SparseHermitian> {
    SpinBasis::new(n_spins)?;
    let half = 0.5 * b_prime;
    Ok(SparseHermitian::from_rows(1 << n_spins, |i, row| {
        for k in 1..=n_spins {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            row.push((i ^ flip_mask(n_spins, k), sign * half));
        }
    }))
}

/// Total spin squared, `3N/4 + 2 Σ_{k<m} S_k·S_m`.
pub fn build_total_spin_squared(n_spins: usize) -> Result<SparseHermitian> {
    SpinBasis::new(n_spins)?;
    let n = n_spins;
    Ok(SparseHermitian::from_rows(1 << n, |i, row| {
        let mut diag = 0.75 * n as f64;
        for k in 1..=n {
            for m in k + 1..=n {
                if spin_bit(i, n, k) == spin_bit(i, n, m) {
                    diag += 0.5;
                } else {
                    diag -= 0.5;
                    row.push((i ^ flip_mask(n, k) ^ flip_mask(n, m), 1.0));
                }
            }
        }
        row.push((i, diag));
    }))
}
