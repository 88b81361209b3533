//! Theoretical tables: weak-test probabilities over checkpoint pairs and the
//! ideal snapshot distribution per checkpoint.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::snapshot::{PartitionB, SnapshotDistribution, PARTITION_CELLS};
use super::ProbabilityEngine;
use crate::error::{LilError, Result};
use crate::scalar::Scalar;

/// Label `ℵi` of the `i`-th checkpoint.
pub fn aleph(i: usize) -> String {
    format!("ℵ{i}")
}

/// Upper-triangular matrix: cell `(i, j)` with `i <= j` holds the
/// probability of passing the weak test on `{n_i, n_j}` (or `{n_i}` when `i == j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakPairTable<T> {
    pub alpha: T,
    pub checkpoints: Vec<u64>,
    pub cells: Vec<Vec<Option<T>>>,
}

impl<T: Scalar> WeakPairTable<T> {
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.cells.get(i)?.get(j).copied().flatten()
    }

    /// CSV with an `alpha` corner cell and `ℵ` row and column labels.
    pub fn to_csv(&self, decimals: usize) -> String {
        let mut out = format!("alpha={}", self.alpha);
        for j in 0..self.checkpoints.len() {
            let _ = write!(out, ",{}", aleph(j));
        }
        out.push('\n');
        for (i, row) in self.cells.iter().enumerate() {
            out.push_str(&aleph(i));
            for cell in row {
                out.push(',');
                if let Some(v) = cell {
                    let _ = write!(out, "{v:.decimals$}");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Ideal snapshot distributions, one column per checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotTable<T> {
    pub columns: Vec<SnapshotDistribution<T>>,
}

impl<T: Scalar> SnapshotTable<T> {
    /// CSV with one row per cell and one column per checkpoint. With
    /// `positive_only` only the 21 cells from `[0.00,0.05)` upward are written.
    pub fn to_csv(&self, decimals: usize, positive_only: bool) -> String {
        let mut out = String::from("cell");
        for c in &self.columns {
            let _ = write!(out, ",{}", c.checkpoint);
        }
        out.push('\n');
        let first = if positive_only {
            PARTITION_CELLS / 2
        } else {
            0
        };
        for k in first..PARTITION_CELLS {
            out.push_str(&PartitionB::label(k));
            for c in &self.columns {
                let _ = write!(out, ",{:.decimals$}", c.mass[k]);
            }
            out.push('\n');
        }
        out
    }
}

impl<T: Scalar> ProbabilityEngine<T> {
    /// Weak-test probabilities for every single checkpoint and every pair.
    pub fn weak_pair_table(&self, alpha: T, checkpoints: &[u64]) -> Result<WeakPairTable<T>> {
        if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LilError::Precondition(
                "table checkpoints must be nonempty and strictly increasing".into(),
            ));
        }
        let theta = T::one() - alpha;
        let k = checkpoints.len();
        let jobs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
        let values = jobs
            .par_iter()
            .map(|&(i, j)| {
                if i == j {
                    self.weak_prob_1(theta, checkpoints[i])
                } else {
                    self.weak_prob_pair(theta, checkpoints[i], checkpoints[j])
                }
            })
            .collect::<Result<Vec<T>>>()?;
        let mut cells = vec![vec![None; k]; k];
        for (&(i, j), v) in jobs.iter().zip(values) {
            cells[i][j] = Some(v);
        }
        Ok(WeakPairTable {
            alpha,
            checkpoints: checkpoints.to_vec(),
            cells,
        })
    }

    pub fn snapshot_table(&self, checkpoints: &[u64]) -> Result<SnapshotTable<T>> {
        let columns = checkpoints
            .iter()
            .map(|&n| self.mu_u(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(SnapshotTable { columns })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(base: u32, count: u32) -> Vec<u64> {
        (0..count).map(|i| 1u64 << (base + i)).collect()
    }

    #[test]
    fn weak_table_shape_and_corner() {
        let e = ProbabilityEngine::<f64>::default();
        let t = e.weak_pair_table(0.1, &points(26, 3)).unwrap();
        assert!((t.get(0, 0).unwrap() - 0.03044).abs() < 5e-5);
        assert!((t.get(0, 1).unwrap() - 0.05085).abs() < 5e-5);
        assert_eq!(t.get(1, 0), None);
        let csv = t.to_csv(5);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "alpha=0.1,ℵ0,ℵ1,ℵ2");
        assert!(lines[1].starts_with("ℵ0,0.03044,0.05085,"));
        assert!(lines[3].starts_with("ℵ2,,,"));
    }

    #[test]
    fn csv_is_reproducible() {
        let e = ProbabilityEngine::<f64>::default();
        let a = e.weak_pair_table(0.05, &points(26, 4)).unwrap().to_csv(12);
        let b = e.weak_pair_table(0.05, &points(26, 4)).unwrap().to_csv(12);
        assert_eq!(a, b);
    }

    #[test]
    fn snapshot_csv() {
        let e = ProbabilityEngine::<f64>::default();
        let t = e.snapshot_table(&points(26, 2)).unwrap();
        let csv = t.to_csv(6, true);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 22);
        assert_eq!(lines[0], "cell,67108864,134217728");
        assert!(lines[1].starts_with("[0.00,0.05),0.047854,"));
        assert!(lines[2].ends_with(",0.047464"));
        assert_eq!(t.to_csv(6, false).lines().count(), 43);
    }

    #[test]
    fn rejects_unsorted_points() {
        let e = ProbabilityEngine::<f64>::default();
        assert!(e.weak_pair_table(0.1, &[1 << 27, 1 << 26]).is_err());
        assert!(e.weak_pair_table(0.1, &[]).is_err());
    }
}
