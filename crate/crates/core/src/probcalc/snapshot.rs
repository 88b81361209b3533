//! The 42-cell partition of the real line and distributions over it.

use serde::{Deserialize, Serialize};

use super::normal::{cdf, sf};
use super::ProbabilityEngine;
use crate::error::{LilError, Result};
use crate::lilstat::lil_scale;
use crate::scalar::Scalar;

pub const PARTITION_CELLS: usize = 42;

/// `(-inf, -1)`, forty cells `[-1 + k/20, -1 + (k+1)/20)`, then `[1, inf)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PartitionB;

impl PartitionB {
    /// Left and right ends of cell `k`; `None` stands for an infinite end.
    pub fn bounds<T: Scalar>(k: usize) -> (Option<T>, Option<T>) {
        assert!(k < PARTITION_CELLS, "cell {k} out of range");
        let edge = |j: usize| T::lit(j as f64 - 20.0) / T::lit(20.0);
        match k {
            0 => (None, Some(-T::one())),
            41 => (Some(T::one()), None),
            _ => (Some(edge(k - 1)), Some(edge(k))),
        }
    }

    /// Index of the cell containing `x`.
    pub fn cell_of<T: Scalar>(x: T) -> usize {
        if x < -T::one() {
            return 0;
        }
        if x >= T::one() {
            return 41;
        }
        let guess = ((x + T::one()) * T::lit(20.0))
            .floor()
            .to_usize()
            .unwrap_or(0)
            + 1;
        let mut k = guess.clamp(1, 40);
        // Correct rounding at cell edges against the exact edge values.
        loop {
            let (lo, hi) = Self::bounds::<T>(k);
            if lo.is_some_and(|lo| x < lo) {
                k -= 1;
            } else if hi.is_some_and(|hi| x >= hi) {
                k += 1;
            } else {
                return k;
            }
        }
    }

    /// Row label such as `[0.05,0.10)`, `(-inf,-1.00)` or `[1.00,inf)`.
    pub fn label(k: usize) -> String {
        match Self::bounds::<f64>(k) {
            (None, Some(b)) => format!("(-inf,{b:.2})"),
            (Some(a), None) => format!("[{a:.2},inf)"),
            (Some(a), Some(b)) => format!("[{a:.2},{b:.2})"),
            (None, None) => unreachable!(),
        }
    }
}

/// Probability mass over [`PartitionB`] at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotDistribution<T> {
    pub checkpoint: u64,
    pub mass: Vec<T>,
}

impl<T: Scalar> SnapshotDistribution<T> {
    pub fn new(checkpoint: u64, mass: Vec<T>) -> Result<Self> {
        if mass.len() != PARTITION_CELLS {
            return Err(LilError::Structure(format!(
                "snapshot needs {PARTITION_CELLS} cells, got {}",
                mass.len()
            )));
        }
        if mass.iter().any(|m| !(*m >= T::zero()) || !m.is_finite()) {
            return Err(LilError::Domain(
                "snapshot masses must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { checkpoint, mass })
    }

    pub fn total(&self) -> T {
        self.mass.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Builds the full distribution from the 21 nonnegative-side cells,
    /// `[0, 0.05)` first and `[1, inf)` last, mirroring them about zero.
    pub fn from_positive_half(checkpoint: u64, half: &[T]) -> Result<Self> {
        if half.len() != PARTITION_CELLS / 2 {
            return Err(LilError::Structure(format!(
                "half snapshot needs {} cells, got {}",
                PARTITION_CELLS / 2,
                half.len()
            )));
        }
        let mass = half.iter().rev().chain(half.iter()).copied().collect();
        Self::new(checkpoint, mass)
    }

    /// Cells `[0, 0.05)` through `[1, inf)`.
    pub fn positive_half(&self) -> &[T] {
        &self.mass[PARTITION_CELLS / 2..]
    }
}

impl<T: Scalar> ProbabilityEngine<T> {
    /// Ideal distribution of `S_lil` at length `n`: cell `[a, b)` receives
    /// `Phi(b s) - Phi(a s)` with `s = sqrt(2 lnln n)`.
    pub fn mu_u(&self, n: u64) -> Result<SnapshotDistribution<T>> {
        Self::check_length(n)?;
        let scale = lil_scale(T::count(n));
        let mass = (0..PARTITION_CELLS)
            .map(|k| match PartitionB::bounds::<T>(k) {
                (None, Some(b)) => cdf(b * scale),
                (Some(a), None) => sf(a * scale),
                // Upper-tail differences on the right half keep precision.
                (Some(a), Some(b)) if a >= T::zero() => sf(a * scale) - sf(b * scale),
                (Some(a), Some(b)) => cdf(b * scale) - cdf(a * scale),
                (None, None) => unreachable!(),
            })
            .collect();
        SnapshotDistribution::new(n, mass)
    }
}
