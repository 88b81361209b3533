//! Scoring a corpus against theory.
//!
//! Raw results keep integer counts, so every derived number in a report can be
//! recomputed from them. Aggregation runs sequentially in sequence-index
//! order, which keeps reports bit-stable however traces were produced.

pub mod distance;
pub mod report;
pub mod traces;

use serde::{Deserialize, Serialize};

use crate::error::{LilError, Result};
use crate::lilstat::LilTrace;
use crate::probcalc::tables::WeakPairTable;
use crate::probcalc::{PartitionB, SnapshotDistribution, PARTITION_CELLS};
use crate::scalar::Scalar;

pub use distance::{distances, tvd_sup, DistanceTriple};
pub use report::{evaluate, EvaluationOptions, EvaluationReport, Thresholds, Verdict};

/// Per-checkpoint counts of sequences with `S_lil >= theta` (`plus`) and
/// `S_lil <= -theta` (`minus`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTestResult<T> {
    pub theta: T,
    pub checkpoints: Vec<u64>,
    pub plus: Vec<u64>,
    pub minus: Vec<u64>,
    pub sample_size: u64,
}

/// Counts for the weak test on every pair `{n_i, n_j}`, `i <= j`, stored row
/// by row. A sequence is on the plus side of a pair if it reaches `theta` at
/// either point, and likewise for the minus side, so one sequence may count
/// on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTestResult<T> {
    pub theta: T,
    pub checkpoints: Vec<u64>,
    pub plus: Vec<Vec<u64>>,
    pub minus: Vec<Vec<u64>>,
    pub sample_size: u64,
}

/// Number of sequences with `|S_lil| > theta` at both points of `pair` and
/// opposite signs there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongTestResult<T> {
    pub theta: T,
    pub pair: (u64, u64),
    pub count: u64,
    pub sample_size: u64,
}

/// Integer cell counts of `S_lil` values at one checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalSnapshot {
    pub checkpoint: u64,
    pub counts: Vec<u64>,
    pub sample_size: u64,
}

impl EmpiricalSnapshot {
    pub fn distribution<T: Scalar>(&self) -> SnapshotDistribution<T> {
        let m = T::count(self.sample_size);
        SnapshotDistribution {
            checkpoint: self.checkpoint,
            mass: self.counts.iter().map(|&c| T::count(c) / m).collect(),
        }
    }
}

fn shared_checkpoints<T: Scalar>(traces: &[LilTrace<T>]) -> Result<Vec<u64>> {
    let first = traces
        .first()
        .ok_or_else(|| LilError::Precondition("no traces to evaluate".into()))?;
    let points: Vec<u64> = first.checkpoints().collect();
    for (i, t) in traces.iter().enumerate().skip(1) {
        if !t.checkpoints().eq(points.iter().copied()) {
            return Err(LilError::Structure(format!(
                "trace {i} has checkpoints different from trace 0"
            )));
        }
    }
    Ok(points)
}

/// Keeps only the entries of `trace` at `checkpoints`, which must all be present.
pub fn restrict<T: Scalar>(trace: &LilTrace<T>, checkpoints: &[u64]) -> Result<LilTrace<T>> {
    let entries = checkpoints
        .iter()
        .map(|&c| {
            trace
                .entries
                .iter()
                .find(|p| p.checkpoint == c)
                .copied()
                .ok_or_else(|| LilError::Structure(format!("trace lacks checkpoint {c}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LilTrace { entries })
}

pub fn run_weak<T: Scalar>(traces: &[LilTrace<T>], theta: T) -> Result<WeakTestResult<T>> {
    let checkpoints = shared_checkpoints(traces)?;
    let mut plus = vec![0; checkpoints.len()];
    let mut minus = vec![0; checkpoints.len()];
    for t in traces {
        for (k, p) in t.entries.iter().enumerate() {
            plus[k] += u64::from(p.s_lil >= theta);
            minus[k] += u64::from(p.s_lil <= -theta);
        }
    }
    Ok(WeakTestResult {
        theta,
        checkpoints,
        plus,
        minus,
        sample_size: traces.len() as u64,
    })
}

pub fn run_pairs<T: Scalar>(traces: &[LilTrace<T>], theta: T) -> Result<PairTestResult<T>> {
    let checkpoints = shared_checkpoints(traces)?;
    let k = checkpoints.len();
    let mut plus = vec![vec![0; k]; k];
    let mut minus = vec![vec![0; k]; k];
    for t in traces {
        for i in 0..k {
            for j in i..k {
                let (a, b) = (t.entries[i].s_lil, t.entries[j].s_lil);
                plus[i][j] += u64::from(a >= theta || b >= theta);
                minus[i][j] += u64::from(a <= -theta || b <= -theta);
            }
        }
    }
    Ok(PairTestResult {
        theta,
        checkpoints,
        plus,
        minus,
        sample_size: traces.len() as u64,
    })
}

pub fn run_strong<T: Scalar>(
    traces: &[LilTrace<T>],
    theta: T,
    pair: (u64, u64),
) -> Result<StrongTestResult<T>> {
    let checkpoints = shared_checkpoints(traces)?;
    let locate = |n: u64| {
        checkpoints
            .iter()
            .position(|&c| c == n)
            .ok_or_else(|| LilError::Structure(format!("checkpoint {n} is not in the traces")))
    };
    let (i, j) = (locate(pair.0)?, locate(pair.1)?);
    let count = traces
        .iter()
        .filter(|t| {
            let (a, b) = (t.entries[i].s_lil, t.entries[j].s_lil);
            a.abs() > theta && b.abs() > theta && a * b < T::zero()
        })
        .count() as u64;
    Ok(StrongTestResult {
        theta,
        pair,
        count,
        sample_size: traces.len() as u64,
    })
}

fn nonzero<T: Scalar>(p: T, what: &str) -> Result<T> {
    if !(p > T::zero()) {
        return Err(LilError::Domain(format!(
            "theoretical probability of {what} is {p}"
        )));
    }
    Ok(p)
}

/// `(1/(t+1)) Σ_i (|p_i^+ - P_i/2| + |p_i^- - P_i/2|) / P_i` with `p_i^±` the
/// empirical fractions and `P_i` the full theoretical pass probability.
pub fn delta_wlil<T: Scalar>(result: &WeakTestResult<T>, theory: &[T]) -> Result<T> {
    if theory.len() != result.checkpoints.len() {
        return Err(LilError::Structure(format!(
            "{} theoretical probabilities for {} checkpoints",
            theory.len(),
            result.checkpoints.len()
        )));
    }
    let m = T::count(result.sample_size);
    let two = T::lit(2.0);
    let mut sum = T::zero();
    for (k, &p) in theory.iter().enumerate() {
        let p = nonzero(p, &format!("checkpoint {}", result.checkpoints[k]))?;
        let plus = (T::count(result.plus[k]) / m - p / two).abs();
        let minus = (T::count(result.minus[k]) / m - p / two).abs();
        sum = sum + (plus + minus) / p;
    }
    Ok(sum / T::count(theory.len() as u64))
}

/// `sqrt(Σ_{i<=j} (d_ij^+² + d_ij^-²) / ((t+1)(t+2)))`, where `d_ij^±` is the
/// empirical plus or minus pass rate of the pair test minus half its
/// theoretical probability.
pub fn rmsd_wlil<T: Scalar>(result: &PairTestResult<T>, theory: &WeakPairTable<T>) -> Result<T> {
    let k = result.checkpoints.len();
    if theory.checkpoints != result.checkpoints {
        return Err(LilError::Structure(
            "pair theory and results use different checkpoints".into(),
        ));
    }
    let m = T::count(result.sample_size);
    let two = T::lit(2.0);
    let mut sum = T::zero();
    for i in 0..k {
        for j in i..k {
            let p = theory.get(i, j).ok_or_else(|| {
                LilError::Structure(format!("missing pair probability ({i}, {j})"))
            })?;
            let p = nonzero(p, &format!("pair ({i}, {j})"))?;
            let plus = T::count(result.plus[i][j]) / m - p / two;
            let minus = T::count(result.minus[i][j]) / m - p / two;
            sum = sum + plus * plus + minus * minus;
        }
    }
    Ok((sum / T::count(((k + 1) * k) as u64)).sqrt())
}

/// Cell counts of `S_lil` at checkpoint `n` across `traces`.
pub fn snapshot<T: Scalar>(traces: &[LilTrace<T>], n: u64) -> Result<EmpiricalSnapshot> {
    if traces.is_empty() {
        return Err(LilError::Precondition("no traces to evaluate".into()));
    }
    let mut counts = vec![0; PARTITION_CELLS];
    for (i, t) in traces.iter().enumerate() {
        let s = t
            .s_lil_at(n)
            .ok_or_else(|| LilError::Structure(format!("trace {i} lacks checkpoint {n}")))?;
        counts[PartitionB::cell_of(s)] += 1;
    }
    Ok(EmpiricalSnapshot {
        checkpoint: n,
        counts,
        sample_size: traces.len() as u64,
    })
}
