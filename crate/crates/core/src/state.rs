use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|Σ|C_n|² − 1|` accepted by [`StateVector::new`].
pub const NORM_TOL: f64 = 1e-9;

/// Normalized complex amplitudes `C_n` over the computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Contract("state vector must be non-empty".into()));
        }
        let norm_sqr = norm_sqr(&amplitudes);
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!(
                "state vector squared norm {norm_sqr} differs from 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalize(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Contract("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { amplitudes })
    }

    /// Wraps amplitudes whose norm was already checked against a looser,
    /// caller-supplied tolerance.
    pub(crate) fn from_checked(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis_state(dimension: usize, index: usize) -> Result<Self> {
        if index >= dimension {
            return Err(Error::Range(format!("basis index {index} outside 0..{dimension}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dimension];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dimension() != other.dimension() {
            return Err(Error::Contract(format!(
                "inner product of dimensions {} and {}",
                self.dimension(),
                other.dimension()
            )));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        self.inner(other).map(|z| z.norm_sqr())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|&c| c * factor).collect(),
        }
    }
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// `⟨a|b⟩ = Σ conj(a_n) b_n`.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
