//! Computational basis conventions.
//!
//! Basis state `|n⟩` is the product of `S^z` eigenstates whose bit string,
//! read left to right as spin 1 ... spin N, is the binary expansion of `n`.
//! Spin 1 is therefore the most significant bit. Bit value 0 is spin "down",
//! 1 is spin "up".

use std::fmt;

use crate::error::{Error, Result};

/// Largest chain length accepted anywhere in the crate.
pub const MAX_SPINS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinBasis {
    n_spins: usize,
}

impl SpinBasis {
    pub fn new(n_spins: usize) -> Result<Self> {
        if n_spins == 0 || n_spins > MAX_SPINS {
            return Err(Error::Config(format!(
                "n_spins must be in 1..={MAX_SPINS}, got {n_spins}"
            )));
        }
        Ok(Self { n_spins })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_spins
    }

    /// Mask that flips spin `k` (1-based).
    #[inline]
    pub fn flip_mask(&self, k: usize) -> usize {
        flip_mask(self.n_spins, k)
    }
}

/// Mask selecting spin `k` (1-based, leftmost is 1) in an `n_spins` register.
#[inline]
pub fn flip_mask(n_spins: usize, k: usize) -> usize {
    debug_assert!(k >= 1 && k <= n_spins);
    1 << (n_spins - k)
}

/// Value (0 or 1) of spin `k` in basis state `index`.
#[inline]
pub fn spin_bit(index: usize, n_spins: usize, k: usize) -> u8 {
    ((index >> (n_spins - k)) & 1) as u8
}

/// `2 S^z` of a basis state: number of up spins minus number of down spins.
#[inline]
pub fn twice_sz(index: usize, n_spins: usize) -> i64 {
    2 * i64::from(index.count_ones()) - n_spins as i64
}

/// Ordered spin pattern, spin 1 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    bits: Vec<u8>,
}

impl SpinConfiguration {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_SPINS {
            return Err(Error::Config(format!(
                "spin configuration length must be in 1..={MAX_SPINS}, got {}",
                bits.len()
            )));
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Config(format!(
                "spin {} has value {}, expected 0 or 1",
                pos + 1,
                bits[pos]
            )));
        }
        Ok(Self { bits })
    }

    pub fn n_spins(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Value of spin `k`, 1-based.
    pub fn spin(&self, k: usize) -> u8 {
        self.bits[k - 1]
    }

    pub fn up_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn spins_to_index(config: &SpinConfiguration) -> usize {
    config
        .bits
        .iter()
        .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
}

pub fn index_to_spins(n: usize, basis: &SpinBasis) -> Result<SpinConfiguration> {
    if n >= basis.dimension() {
        return Err(Error::Range(format!(
            "basis index {n} outside 0..{}",
            basis.dimension()
        )));
    }
    let bits = (1..=basis.n_spins)
        .map(|k| spin_bit(n, basis.n_spins, k))
        .collect();
    Ok(SpinConfiguration { bits })
}
