//! The evaluation report: raw counts, theory, scores and verdicts.

use serde::{Deserialize, Serialize};

use super::{
    delta_wlil, distances, restrict, rmsd_wlil, run_pairs, run_strong, run_weak, snapshot,
    DistanceTriple, EmpiricalSnapshot, PairTestResult, StrongTestResult, WeakTestResult,
};
use crate::bitstream::CheckpointSet;
use crate::error::{LilError, Result};
use crate::lilstat::LilTrace;
use crate::probcalc::tables::WeakPairTable;
use crate::probcalc::{ProbabilityEngine, SnapshotDistribution};

/// A generator is flagged when any checkpoint reaches either bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub tvd: f64,
    pub rmsd: f64,
    /// Sample size the bounds are stated for.
    pub reference_sample_size: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            tvd: 0.03,
            rmsd: 0.001,
            reference_sample_size: 1000,
        }
    }
}

/// Samples smaller than this trigger a warning in the report.
pub const LOW_SAMPLE_WARNING: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationOptions {
    pub alpha: f64,
    pub checkpoints: CheckpointSet,
    pub thresholds: Thresholds,
    /// Pair for the strong test; defaults to the first and last checkpoints.
    pub strong_pair: Option<(u64, u64)>,
}

impl EvaluationOptions {
    pub fn new(alpha: f64, checkpoints: CheckpointSet) -> Self {
        Self {
            alpha,
            checkpoints,
            thresholds: Thresholds::default(),
            strong_pair: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotReport {
    pub checkpoint: u64,
    pub empirical: EmpiricalSnapshot,
    pub distances: DistanceTriple<f64>,
    /// Mean total variation of a truly random sample of the same size.
    pub expected_ideal_tvd: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongReport {
    pub probability: f64,
    pub result: StrongTestResult<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub generator: String,
    pub code_version: String,
    pub alpha: f64,
    pub theta: f64,
    pub sample_size: u64,
    pub checkpoints: Vec<u64>,
    /// Single-checkpoint weak-test probabilities.
    pub weak_theory: Vec<f64>,
    pub weak: WeakTestResult<f64>,
    pub pair_theory: WeakPairTable<f64>,
    pub pairs: PairTestResult<f64>,
    pub strong: Option<StrongReport>,
    pub delta_wlil: f64,
    pub rmsd_wlil: f64,
    pub snapshots: Vec<SnapshotReport>,
    pub thresholds: Thresholds,
    pub warnings: Vec<String>,
    pub verdict: Verdict,
    /// Configuration of the run that produced the report, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

/// `E|X/m - p|` for `X ~ Binomial(m, p)`, from the closed-form mean absolute deviation.
pub fn binomial_mean_abs_deviation(m: u64, p: f64) -> f64 {
    if m == 0 || p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    let mf = m as f64;
    let k = (mf * p).floor() + 1.0;
    if k > mf {
        return 0.0;
    }
    let ln_choose = libm::lgamma(mf + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(mf - k + 1.0);
    let ln = ln_choose + k * p.ln() + (mf - k + 1.0) * (1.0 - p).ln();
    2.0 * k * ln.exp() / mf
}

/// Mean total variation between `ideal` and the empirical distribution of `m` draws from it.
pub fn expected_sampling_tvd(ideal: &SnapshotDistribution<f64>, m: u64) -> f64 {
    ideal
        .mass
        .iter()
        .map(|&p| binomial_mean_abs_deviation(m, p))
        .sum::<f64>()
        / 2.0
}

/// Scores `traces` (in sequence-index order) against theory.
pub fn evaluate(
    generator: &str,
    traces: &[LilTrace<f64>],
    options: &EvaluationOptions,
    engine: &ProbabilityEngine<f64>,
) -> Result<EvaluationReport> {
    if !(options.alpha > 0.0 && options.alpha < 1.0) {
        return Err(LilError::Domain(format!(
            "alpha = {} is outside (0, 1)",
            options.alpha
        )));
    }
    let theta = 1.0 - options.alpha;
    let points = options.checkpoints.points();
    let traces = traces
        .iter()
        .map(|t| restrict(t, points))
        .collect::<Result<Vec<_>>>()?;
    let m = traces.len() as u64;

    let weak_theory = points
        .iter()
        .map(|&n| engine.weak_prob_1(theta, n))
        .collect::<Result<Vec<_>>>()?;
    let weak = run_weak(&traces, theta)?;
    let pair_theory = engine.weak_pair_table(options.alpha, points)?;
    let pairs = run_pairs(&traces, theta)?;

    let strong_pair = options
        .strong_pair
        .or_else(|| (points.len() > 1).then(|| (points[0], points[points.len() - 1])))
        .filter(|&(a, b)| b >= a.saturating_mul(2));
    let strong = strong_pair
        .map(|pair| {
            Ok::<_, LilError>(StrongReport {
                probability: engine.strong_prob(theta, pair.0, pair.1)?,
                result: run_strong(&traces, theta, pair)?,
            })
        })
        .transpose()?;

    let mut snapshots = Vec::with_capacity(points.len());
    for &n in points {
        let empirical = snapshot(&traces, n)?;
        let ideal = engine.mu_u(n)?;
        let d = distances(&empirical.distribution(), &ideal)?;
        let verdict = if d.tvd >= options.thresholds.tvd || d.rmsd >= options.thresholds.rmsd {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        snapshots.push(SnapshotReport {
            checkpoint: n,
            empirical,
            distances: d,
            expected_ideal_tvd: expected_sampling_tvd(&ideal, m),
            verdict,
        });
    }

    let mut warnings = Vec::new();
    if m < LOW_SAMPLE_WARNING {
        warnings.push(format!(
            "only {m} sequences; distances are dominated by sampling noise below {LOW_SAMPLE_WARNING}"
        ));
    }
    if m != options.thresholds.reference_sample_size {
        warnings.push(format!(
            "thresholds are stated for {} sequences, this run has {m}",
            options.thresholds.reference_sample_size
        ));
    }
    if let Some(s) = snapshots
        .iter()
        .find(|s| s.expected_ideal_tvd >= options.thresholds.tvd)
    {
        warnings.push(format!(
            "an ideal source of this sample size has expected TVD {:.4} at {} bits, above the {} threshold",
            s.expected_ideal_tvd, s.checkpoint, options.thresholds.tvd
        ));
    }
    let verdict = if snapshots.iter().any(|s| s.verdict == Verdict::Fail) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };

    Ok(EvaluationReport {
        generator: generator.to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        alpha: options.alpha,
        theta,
        sample_size: m,
        checkpoints: points.to_vec(),
        delta_wlil: delta_wlil(&weak, &weak_theory)?,
        rmsd_wlil: rmsd_wlil(&pairs, &pair_theory)?,
        weak_theory,
        weak,
        pair_theory,
        pairs,
        strong,
        snapshots,
        thresholds: options.thresholds,
        warnings,
        verdict,
        config: None,
    })
}
