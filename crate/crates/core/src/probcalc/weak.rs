//! Weak-test probabilities on one to four checkpoints.
//!
//! Notation used below, for a checkpoint `n` and ratio `t`:
//!
//! * `Y ~ N(0,1)` is `S*` of the first `n` bits.
//! * `X ~ N(0,1)` is `S*` of bits `n..tn`, independent of `Y`.
//! * `|S_lil(n)| >= theta` is `|Y| >= theta * sqrt(2 lnln n)`.
//! * `S_lil(tn) >= theta` is `X >= (theta * sqrt(2 t lnln tn) - Y) / sqrt(t - 1)`.

use serde::{Deserialize, Serialize};

use super::normal::{pdf, sf};
use super::quadrature::integrate;
use super::ProbabilityEngine;
use crate::error::{LilError, Result};
use crate::lilstat::lil_scale;
use crate::scalar::Scalar;

/// Both evaluations of a two-checkpoint probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRoutes<T> {
    /// `P(n)` plus the probability of first passing at `tn`.
    pub conditional: T,
    /// `P(n) + P(tn)` minus the probability of passing at both.
    pub inclusion_exclusion: T,
}

/// Interval known to contain a four-checkpoint probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityBracket<T> {
    pub lower: T,
    pub upper: T,
    /// Probability of passing at each of the three largest checkpoints,
    /// an upper bound on passing at all four.
    pub intersection_bound: T,
    /// Sum of the single-checkpoint probabilities.
    pub union_bound: T,
}

impl<T: Scalar> ProbabilityEngine<T> {
    /// `2 (1 - Phi(theta sqrt(2 lnln n)))`.
    pub fn weak_prob_1(&self, theta: T, n: u64) -> Result<T> {
        Self::check_theta(theta)?;
        Self::check_length(n)?;
        Ok(Self::single(theta, T::count(n)))
    }

    fn single(theta: T, n: T) -> T {
        T::lit(2.0) * sf(theta * lil_scale(n))
    }

    /// Probability of passing the weak test on `{n, t n}`.
    ///
    /// Computed both by conditioning on the first checkpoint and by
    /// inclusion–exclusion; the two must agree to `pair_route_tolerance`.
    pub fn weak_prob_2(&self, theta: T, n: u64, t: T) -> Result<T> {
        let routes = self.weak_prob_2_routes(theta, n, t)?;
        Self::route_mismatch(
            "pair probability routes",
            routes.conditional,
            routes.inclusion_exclusion,
            self.pair_route_tolerance,
        )?;
        Ok(routes.conditional)
    }

    /// Same as [`Self::weak_prob_2`] for two explicit checkpoints.
    pub fn weak_prob_pair(&self, theta: T, n1: u64, n2: u64) -> Result<T> {
        self.weak_prob_2(theta, n1, T::count(n2) / T::count(n1))
    }

    pub fn weak_prob_2_routes(&self, theta: T, n: u64, t: T) -> Result<PairRoutes<T>> {
        Self::check_theta(theta)?;
        Self::check_length(n)?;
        Self::check_ratio(t)?;
        let nf = T::count(n);
        let tn = t * nf;
        let two = T::lit(2.0);
        let near = theta * lil_scale(nf);
        let far = theta * (t * two * tn.ln().ln()).sqrt();
        let spread = (t - T::one()).sqrt();
        let reach_far = |y: T| pdf(y) * sf((far - y) / spread);

        let first_only = integrate(reach_far, -near, near, self.tolerance)?.value;
        let conditional = Self::single(theta, nf) + two * first_only;

        let upper = self.tail_sigma.max(near);
        let same_sign = integrate(reach_far, near, upper, self.tolerance)?.value;
        let opposite_sign = self.strong_gaussian(theta, nf, t)?;
        let inclusion_exclusion =
            Self::single(theta, nf) + Self::single(theta, tn) - two * same_sign - opposite_sign;

        Ok(PairRoutes {
            conditional,
            inclusion_exclusion,
        })
    }

    /// Probability of passing the weak test on `{n, t1 n, t1 t2 n}`.
    ///
    /// Adds to the pair probability the chance of staying inside at `n` and
    /// `t1 n` and first crossing at `t1 t2 n`. With `z` the walk at `t1 n`
    /// in units of `sqrt n`, `z | y ~ N(y, t1 - 1)`; the innermost tail
    /// integral is taken in closed form through `Phi`.
    pub fn weak_prob_3(&self, theta: T, n: u64, t1: T, t2: T) -> Result<T> {
        Self::check_theta(theta)?;
        Self::check_length(n)?;
        Self::check_ratio(t1)?;
        Self::check_ratio(t2)?;
        let nf = T::count(n);
        let two = T::lit(2.0);
        let mid = t1 * nf;
        let last = t2 * mid;

        let y_limit = theta * lil_scale(nf);
        let z_limit = theta * (two * t1 * mid.ln().ln()).sqrt();
        let far = theta * (two * t2 * last.ln().ln()).sqrt();
        let spread1 = (t1 - T::one()).sqrt();
        let spread2 = (t2 - T::one()).sqrt();
        let sqrt_t1 = t1.sqrt();
        let inner_tol = self.tolerance / (two * z_limit).max(T::one());

        // An inner failure poisons the outer integral with NaN.
        let outer = |z: T| -> T {
            integrate(
                |y: T| pdf(y) * pdf((z - y) / spread1) / spread1,
                -y_limit,
                y_limit,
                inner_tol,
            )
            .map_or(T::nan(), |d| d.value * sf((far - z / sqrt_t1) / spread2))
        };
        let third = integrate(outer, -z_limit, z_limit, self.tolerance)?.value;
        if !third.is_finite() {
            return Err(LilError::Numerical {
                context: "three-point inner integral".into(),
                residual: f64::NAN,
                tolerance: inner_tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.weak_prob_2(theta, n, t1)? + two * third)
    }

    /// Probability of passing on `{n1, n2, n3}` given as explicit checkpoints.
    pub fn weak_prob_triple(&self, theta: T, points: [u64; 3]) -> Result<T> {
        let [a, b, c] = points.map(T::count);
        self.weak_prob_3(theta, points[0], b / a, c / b)
    }

    /// Bracket for the four-checkpoint probability.
    ///
    /// Inclusion–exclusion over singles, pairs and triples gives the exact
    /// probability plus the (unknown) probability of passing at all four
    /// checkpoints. That sum is the upper end; subtracting the probability of
    /// passing at all of the three largest checkpoints gives the lower end.
    pub fn weak_prob_4_bounds(
        &self,
        theta: T,
        checkpoints: [u64; 4],
    ) -> Result<ProbabilityBracket<T>> {
        Self::check_theta(theta)?;
        let mut points = checkpoints;
        points.sort_unstable();
        for w in points.windows(2) {
            Self::check_ratio(T::count(w[1]) / T::count(w[0]))?;
        }

        let single = |i: usize| self.weak_prob_1(theta, points[i]);
        let pair = |i: usize, j: usize| self.weak_prob_pair(theta, points[i], points[j]);
        let triple = |i: usize, j: usize, k: usize| {
            self.weak_prob_triple(theta, [points[i], points[j], points[k]])
        };

        let singles = (0..4).map(single).collect::<Result<Vec<_>>>()?;
        let mut pairs = T::zero();
        for i in 0..4 {
            for j in i + 1..4 {
                pairs = pairs + pair(i, j)?;
            }
        }
        let mut triples = T::zero();
        for skip in 0..4 {
            let idx: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
            triples = triples + triple(idx[0], idx[1], idx[2])?;
        }
        let union_bound = singles.iter().fold(T::zero(), |a, &b| a + b);
        let upper = union_bound + triples - pairs;

        // P(E1 ∩ E2 ∩ E3) = P(E1 ∪ E2 ∪ E3) + ΣP(Ei) − ΣP(Ei ∪ Ej) over the last three.
        let intersection_bound = triple(1, 2, 3)? + singles[1] + singles[2] + singles[3]
            - pair(1, 2)?
            - pair(1, 3)?
            - pair(2, 3)?;
        Ok(ProbabilityBracket {
            lower: upper - intersection_bound.max(T::zero()),
            upper,
            intersection_bound,
            union_bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> ProbabilityEngine<f64> {
        ProbabilityEngine::default()
    }

    const N26: u64 = 1 << 26;

    #[test]
    fn single_point_table_values() {
        let e = engine();
        assert!((e.weak_prob_1(0.9, N26).unwrap() - 0.03044).abs() < 5e-5);
        assert!((e.weak_prob_1(0.95, N26).unwrap() - 0.02234).abs() < 5e-5);
    }

    #[test]
    fn single_point_small_theta_tends_to_one() {
        let p = engine().weak_prob_1(1e-9, N26).unwrap();
        assert!((p - 1.0).abs() < 1e-8);
    }

    #[test]
    fn single_point_decreases_in_theta_and_length() {
        let e = engine();
        let mut last = 1.0;
        for k in 1..99 {
            let p = e.weak_prob_1(k as f64 / 100.0, N26).unwrap();
            assert!(p < last);
            last = p;
        }
        let mut last = 1.0;
        for exp in 16..40 {
            let p = e.weak_prob_1(0.9, 1u64 << exp).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let e = engine();
        assert!(e.weak_prob_1(1.0, N26).is_err());
        assert!(e.weak_prob_1(0.0, N26).is_err());
        assert!(e.weak_prob_1(0.9, 1 << 15).is_err());
        assert!(e.weak_prob_2(0.9, N26, 1.5).is_err());
        assert!(e.weak_prob_3(0.9, N26, 8.0, 1.0).is_err());
    }

    #[test]
    fn pair_values() {
        let e = engine();
        assert!((e.weak_prob_2(0.9, N26, 2.0).unwrap() - 0.05085).abs() < 5e-5);
        assert!((e.weak_prob_2(0.9, N26, 256.0).unwrap() - 0.05334).abs() < 5e-5);
        assert!((e.weak_prob_2(0.95, 1 << 27, 2.0).unwrap() - 0.03633).abs() < 5e-5);
    }

    #[test]
    fn pair_routes_agree() {
        let e = engine();
        for t in [2.0, 4.0, 16.0, 256.0, 1000.0] {
            let r = e.weak_prob_2_routes(0.9, N26, t).unwrap();
            assert!(
                (r.conditional - r.inclusion_exclusion).abs() < 1e-9,
                "t = {t}: {r:?}"
            );
        }
    }

    #[test]
    fn pair_lies_between_max_single_and_union() {
        let e = engine();
        for t in [2.0, 8.0, 64.0] {
            let p = e.weak_prob_2(0.9, N26, t).unwrap();
            let a = e.weak_prob_1(0.9, N26).unwrap();
            let b = e.weak_prob_1(0.9, (N26 as f64 * t) as u64).unwrap();
            assert!(p >= a.max(b) && p <= a + b);
        }
    }

    #[test]
    fn triple_values() {
        let e = engine();
        let cases = [
            (0.9, N26, 8.0, 8.0, 0.07755),
            (0.9, 1u64 << 29, 8.0, 4.0, 0.06995),
            (0.95, N26, 16.0, 16.0, 0.05645),
        ];
        for (theta, n, t1, t2, want) in cases {
            let p = e.weak_prob_3(theta, n, t1, t2).unwrap();
            assert!((p - want).abs() < 2e-4, "{p} vs {want}");
        }
    }

    #[test]
    fn four_point_bracket() {
        let e = engine();
        let b = e
            .weak_prob_4_bounds(0.9, [1 << 26, 1 << 29, 1 << 32, 1 << 34])
            .unwrap();
        assert!(b.lower <= b.upper);
        assert!(b.upper <= b.union_bound);
        assert!((b.lower - 0.09630).abs() < 2e-4, "{b:?}");
        assert!((b.upper - 0.09662).abs() < 2e-4, "{b:?}");
    }

    #[test]
    fn single_precision_engine() {
        let e = ProbabilityEngine::<f32>::default();
        assert!((e.weak_prob_1(0.9, N26).unwrap() - 0.03044).abs() < 5e-5);
        assert!((e.weak_prob_2(0.9, N26, 2.0).unwrap() - 0.05085).abs() < 5e-5);
    }
}
