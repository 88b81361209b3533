//! Theoretical pass probabilities for the weak, strong and snapshot LIL tests.
//!
//! Every probability rests on the normal approximation of the ones-count: for a
//! uniformly random prefix of length `n`, `S*` is approximately standard normal,
//! and `S*` over disjoint blocks are independent. Joint events at several
//! checkpoints become iterated Gaussian integrals, evaluated with the adaptive
//! quadrature in [`quadrature`].
//!
//! The normal approximation itself carries an error of roughly `2e-7` for
//! `n >= 2^26` and `|S_lil| <= 1`; it is not corrected for.

pub mod normal;
pub mod quadrature;
pub mod snapshot;
pub mod strong;
pub mod tables;
pub mod weak;

use serde::{Deserialize, Serialize};

use crate::bitstream::{CheckpointSet, MIN_LIL_CHECKPOINT};
use crate::error::{LilError, Result};
use crate::scalar::Scalar;

pub use snapshot::{PartitionB, SnapshotDistribution, PARTITION_CELLS};
pub use weak::ProbabilityBracket;

/// Numerical settings shared by all probability computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEngine<T> {
    /// Absolute tolerance for each one-dimensional integral.
    pub tolerance: T,
    /// Infinite limits are truncated this many standard deviations out.
    pub tail_sigma: T,
    /// Allowed disagreement between the two routes for pair probabilities.
    pub pair_route_tolerance: T,
    /// Allowed disagreement between the Gaussian and negative-binomial strong routes.
    pub strong_route_tolerance: T,
}

impl<T: Scalar> Default for ProbabilityEngine<T> {
    fn default() -> Self {
        let tolerance = T::quadrature_tolerance();
        Self {
            tolerance,
            tail_sigma: T::lit(9.0),
            pair_route_tolerance: T::lit(1e-7).max(tolerance * T::lit(10.0)),
            strong_route_tolerance: T::lit(1e-5),
        }
    }
}

impl<T: Scalar> ProbabilityEngine<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn check_theta(theta: T) -> Result<()> {
        if !(theta > T::zero() && theta < T::one()) {
            return Err(LilError::Domain(format!(
                "theta = {theta} is outside (0, 1)"
            )));
        }
        Ok(())
    }

    pub(crate) fn check_length(n: u64) -> Result<()> {
        if n < MIN_LIL_CHECKPOINT {
            return Err(LilError::Domain(format!(
                "length {n} is below the 2^16-bit minimum"
            )));
        }
        Ok(())
    }

    pub(crate) fn check_ratio(t: T) -> Result<()> {
        if !(t >= T::lit(2.0)) || !t.is_finite() {
            return Err(LilError::Domain(format!("checkpoint ratio {t} is below 2")));
        }
        Ok(())
    }

    pub(crate) fn route_mismatch(context: &str, a: T, b: T, tolerance: T) -> Result<()> {
        let diff = (a - b).abs();
        if diff > tolerance || !diff.is_finite() {
            return Err(LilError::Numerical {
                context: context.to_string(),
                residual: diff.to_f64().unwrap_or(f64::NAN),
                tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

/// Significance level and checkpoints of a weak `(alpha, ℵ)` test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTestSpec<T> {
    pub alpha: T,
    pub checkpoints: CheckpointSet,
}

/// Probability of passing a weak test; four-point sets are only bracketed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeakProbability<T> {
    Exact { value: T },
    Bracket(ProbabilityBracket<T>),
}

impl<T: Scalar> WeakTestSpec<T> {
    pub fn new(alpha: T, checkpoints: CheckpointSet) -> Result<Self> {
        if !(alpha > T::zero() && alpha <= T::lit(0.25)) {
            return Err(LilError::Domain(format!(
                "alpha = {alpha} is outside (0, 0.25]"
            )));
        }
        if !(1..=4).contains(&checkpoints.len()) {
            return Err(LilError::Domain(format!(
                "weak-test probabilities cover 1 to 4 checkpoints, got {}",
                checkpoints.len()
            )));
        }
        Ok(Self { alpha, checkpoints })
    }

    pub fn theta(&self) -> T {
        T::one() - self.alpha
    }

    pub fn probability(&self, engine: &ProbabilityEngine<T>) -> Result<WeakProbability<T>> {
        let theta = self.theta();
        let p = self.checkpoints.points();
        let ratio = |i: usize, j: usize| T::count(p[j]) / T::count(p[i]);
        let value = match p.len() {
            1 => engine.weak_prob_1(theta, p[0])?,
            2 => engine.weak_prob_2(theta, p[0], ratio(0, 1))?,
            3 => engine.weak_prob_3(theta, p[0], ratio(0, 1), ratio(1, 2))?,
            _ => {
                let bracket = engine.weak_prob_4_bounds(theta, [p[0], p[1], p[2], p[3]])?;
                return Ok(WeakProbability::Bracket(bracket));
            }
        };
        Ok(WeakProbability::Exact { value })
    }
}
