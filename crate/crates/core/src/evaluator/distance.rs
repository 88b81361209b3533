//! Distances between distributions on the snapshot partition.

use serde::{Deserialize, Serialize};

use crate::error::{LilError, Result};
use crate::probcalc::{SnapshotDistribution, PARTITION_CELLS};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceTriple<T> {
    /// Total variation: half the L1 distance.
    pub tvd: T,
    /// `sqrt(Σ (sqrt p - sqrt q)² / 2)`.
    pub hellinger: T,
    /// `sqrt(Σ (p - q)² / 42)`.
    pub rmsd: T,
}

fn check<T: Scalar>(p: &SnapshotDistribution<T>, q: &SnapshotDistribution<T>) -> Result<()> {
    if p.mass.len() != PARTITION_CELLS || q.mass.len() != PARTITION_CELLS {
        return Err(LilError::Structure(
            "distributions must have 42 cells".into(),
        ));
    }
    if p.checkpoint != q.checkpoint {
        return Err(LilError::Precondition(format!(
            "comparing checkpoint {} with checkpoint {}",
            p.checkpoint, q.checkpoint
        )));
    }
    Ok(())
}

pub fn distances<T: Scalar>(
    p: &SnapshotDistribution<T>,
    q: &SnapshotDistribution<T>,
) -> Result<DistanceTriple<T>> {
    check(p, q)?;
    let (mut l1, mut hel, mut sq) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in p.mass.iter().zip(&q.mass) {
        let d = a - b;
        let h = a.sqrt() - b.sqrt();
        l1 = l1 + d.abs();
        hel = hel + h * h;
        sq = sq + d * d;
    }
    let two = T::lit(2.0);
    Ok(DistanceTriple {
        tvd: l1 / two,
        hellinger: (hel / two).sqrt(),
        rmsd: (sq / T::count(PARTITION_CELLS as u64)).sqrt(),
    })
}

/// Total variation as the largest `p(A) - q(A)` over unions of cells: the
/// maximizing union is exactly the set of cells where `p` exceeds `q`.
pub fn tvd_sup<T: Scalar>(p: &SnapshotDistribution<T>, q: &SnapshotDistribution<T>) -> Result<T> {
    check(p, q)?;
    Ok(p.mass
        .iter()
        .zip(&q.mass)
        .filter(|(a, b)| a > b)
        .fold(T::zero(), |s, (&a, &b)| s + (a - b)))
}
