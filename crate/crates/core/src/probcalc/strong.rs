//! Strong-test probability: `|S_lil| > theta` at two checkpoints with opposite signs.

use serde::{Deserialize, Serialize};

use super::normal::{cdf, pdf};
use super::quadrature::integrate;
use super::ProbabilityEngine;
use crate::error::{LilError, Result};
use crate::lilstat::lil_scale;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongRoutes<T> {
    /// Gaussian increment between the checkpoints.
    pub gaussian: T,
    /// Waiting time for the required ones as a negative-binomial variable.
    pub negative_binomial: T,
}

impl<T: Scalar> ProbabilityEngine<T> {
    /// Probability of the strong test on `({n1}, {n2})`, both signs counted.
    pub fn strong_prob(&self, theta: T, n1: u64, n2: u64) -> Result<T> {
        let routes = self.strong_prob_routes(theta, n1, n2)?;
        Self::route_mismatch(
            "strong probability routes",
            routes.gaussian,
            routes.negative_binomial,
            self.strong_route_tolerance,
        )?;
        Ok(routes.gaussian)
    }

    pub fn strong_prob_routes(&self, theta: T, n1: u64, n2: u64) -> Result<StrongRoutes<T>> {
        Self::check_theta(theta)?;
        Self::check_length(n1)?;
        if n2 < n1.saturating_mul(2) {
            return Err(LilError::Domain(format!(
                "strong test needs n2 >= 2 n1, got {n1} and {n2}"
            )));
        }
        let (a, b) = (T::count(n1), T::count(n2));
        Ok(StrongRoutes {
            gaussian: self.strong_gaussian(theta, a, b / a)?,
            negative_binomial: self.strong_negative_binomial(theta, a, b)?,
        })
    }

    /// `2 ∫_{A}^{∞} φ(y) Φ(-(B + y)/sqrt(t-1)) dy` with `A = θ sqrt(2 lnln n)`
    /// and `B = θ sqrt(2 t lnln tn)`: start above `θ` at `n`, end below `-θ` at `tn`.
    pub(crate) fn strong_gaussian(&self, theta: T, n: T, t: T) -> Result<T> {
        let two = T::lit(2.0);
        let near = theta * lil_scale(n);
        let far = theta * (two * t * (t * n).ln().ln()).sqrt();
        let spread = (t - T::one()).sqrt();
        if near >= self.tail_sigma {
            return Ok(T::zero());
        }
        let r = integrate(
            |y: T| pdf(y) * cdf(-(far + y) / spread),
            near,
            self.tail_sigma,
            self.tolerance,
        )?;
        Ok(two * r.value)
    }

    /// Starting at `S* = y <= -A` after `n1` bits, the walk must collect
    /// `r(y) = (n2 - n1 + θ sqrt(2 n2 lnln n2) - y sqrt(n1)) / 2` ones among the
    /// next `n2 - n1` bits. The position of the `r`-th one is approximately
    /// `N(2r, 2r)`.
    fn strong_negative_binomial(&self, theta: T, n1: T, n2: T) -> Result<T> {
        let two = T::lit(2.0);
        let near = theta * lil_scale(n1);
        let far_excess = theta * (two * n2 * n2.ln().ln()).sqrt();
        let root_n1 = n1.sqrt();
        if near >= self.tail_sigma {
            return Ok(T::zero());
        }
        let r = integrate(
            |y: T| {
                let needed = (n2 - n1 + far_excess - y * root_n1) / two;
                // n2 - n1 - 2r(y), written without cancellation.
                let slack = y * root_n1 - far_excess;
                pdf(y) * cdf(slack / (two * needed).sqrt())
            },
            -self.tail_sigma,
            -near,
            self.tolerance,
        )?;
        Ok(two * r.value)
    }
}
