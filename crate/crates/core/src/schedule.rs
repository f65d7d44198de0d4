//! Linear interpolation `H(s) = s·H_final + (1 − s)·H_driver`, `s = t/τ`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{self, Exec, PAR_MIN_ROWS};
use crate::operators::SparseHermitian;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealSchedule {
    tau: f64,
}

impl AnnealSchedule {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Config(format!("tau must be positive and finite, got {tau}")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Progress `s = t/τ`.
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.tau).contains(&t) {
            return Err(Error::Range(format!("time {t} outside [0, {}]", self.tau)));
        }
        Ok(t / self.tau)
    }

    /// `t/τ` clamped to [0, 1]; absorbs last-ulp overshoot of integrator stages.
    pub(crate) fn s_clamped(&self, t: f64) -> f64 {
        (t / self.tau).clamp(0.0, 1.0)
    }
}

#[derive(Clone, Debug)]
pub struct AnnealHamiltonian {
    h_final: SparseHermitian,
    h_driver: SparseHermitian,
    schedule: AnnealSchedule,
}

impl AnnealHamiltonian {
    pub fn new(h_final: SparseHermitian, h_driver: SparseHermitian, schedule: AnnealSchedule) -> Result<Self> {
        if h_final.dimension() != h_driver.dimension() {
            return Err(Error::Contract(format!(
                "final Hamiltonian dimension {} differs from driver dimension {}",
                h_final.dimension(),
                h_driver.dimension()
            )));
        }
        Ok(Self { h_final, h_driver, schedule })
    }

    pub fn h_final(&self) -> &SparseHermitian {
        &self.h_final
    }

    pub fn h_driver(&self) -> &SparseHermitian {
        &self.h_driver
    }

    pub fn schedule(&self) -> &AnnealSchedule {
        &self.schedule
    }

    pub fn dimension(&self) -> usize {
        self.h_final.dimension()
    }

    fn check(&self, s: f64, len: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Range(format!("progress s = {s} outside [0, 1]")));
        }
        if len != self.dimension() {
            return Err(Error::Contract(format!(
                "vector of length {len} applied to Hamiltonian of dimension {}",
                self.dimension()
            )));
        }
        Ok(())
    }

    /// `H(s)·v`.
    pub fn apply_at(&self, s: f64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dimension()];
        self.apply_at_into(s, v, &mut out, Exec::default())?;
        Ok(out)
    }

    /// `out = H(s)·v`, evaluated row by row from the two stored matrices.
    pub fn apply_at_into(&self, s: f64, v: &[Complex64], out: &mut [Complex64], exec: Exec) -> Result<()> {
        self.check(s, v.len())?;
        self.check(s, out.len())?;
        self.apply_unchecked(s, v, out, exec);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&self, s: f64, v: &[Complex64], out: &mut [Complex64], exec: Exec) {
        let (wf, wd) = (s, 1.0 - s);
        exec::for_each_chunk(exec, out, PAR_MIN_ROWS, |offset, chunk| {
            for (r, o) in chunk.iter_mut().enumerate() {
                let i = offset + r;
                let f: Complex64 = self.h_final.row(i).map(|(j, h)| v[j] * h).sum();
                let d: Complex64 = self.h_driver.row(i).map(|(j, h)| v[j] * h).sum();
                *o = f * wf + d * wd;
            }
        });
    }

    /// Dense `H(s)`.
    pub fn dense_at(&self, s: f64) -> Result<DMatrix<f64>> {
        self.check(s, self.dimension())?;
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        self.h_final.add_to_dense(s, &mut m);
        self.h_driver.add_to_dense(1.0 - s, &mut m);
        Ok(m)
    }
}
