//! Reduced deviation `S*` and the LIL statistic `S_lil`.
//!
//! For a prefix of `n` bits containing `S` ones:
//!
//! ```text
//! S*    = (2S - n) / sqrt(n)
//! S_lil = (2S - n) / sqrt(2 n ln ln n)
//! ```
//!
//! so that `S_lil * sqrt(2 ln ln n) = S*`.

use serde::{Deserialize, Serialize};

use crate::bitstream::{popcount, CountTrace};
use crate::error::{LilError, Result};
use crate::scalar::{ln_ln, Scalar};

/// Smallest length for which `S_lil` is defined here.
pub const MIN_LIL_LENGTH: u64 = 16;

fn check_counts(ones: u64, n: u64) -> Result<()> {
    if n == 0 {
        return Err(LilError::Domain("sequence length must be positive".into()));
    }
    if ones > n {
        return Err(LilError::Domain(format!(
            "{ones} ones cannot occur in {n} bits"
        )));
    }
    Ok(())
}

/// Signed excess `2S - n` as a float, computed exactly in integers first.
#[inline]
fn excess<T: Scalar>(ones: u64, n: u64) -> T {
    let twice = 2 * ones as i128 - n as i128;
    T::from_i128(twice).expect("excess fits in a float")
}

pub fn s_star<T: Scalar>(ones: u64, n: u64) -> Result<T> {
    check_counts(ones, n)?;
    Ok(excess::<T>(ones, n) / T::count(n).sqrt())
}

pub fn s_lil<T: Scalar>(ones: u64, n: u64) -> Result<T> {
    check_counts(ones, n)?;
    if n < MIN_LIL_LENGTH {
        return Err(LilError::Domain(format!(
            "S_lil needs at least {MIN_LIL_LENGTH} bits, got {n}"
        )));
    }
    let nf = T::count(n);
    Ok(excess::<T>(ones, n) / (T::lit(2.0) * nf * ln_ln(nf)).sqrt())
}

/// `sqrt(2 ln ln n)`, the factor converting `S_lil` into `S*`.
pub fn lil_scale<T: Scalar>(n: T) -> T {
    (T::lit(2.0) * ln_ln(n)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LilPoint<T> {
    pub checkpoint: u64,
    pub ones: u64,
    pub s_star: T,
    pub s_lil: T,
}

/// Per-sequence statistics at each checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LilTrace<T> {
    pub entries: Vec<LilPoint<T>>,
}

impl<T: Scalar> LilTrace<T> {
    pub fn from_counts(counts: &CountTrace) -> Result<Self> {
        let entries = counts
            .entries
            .iter()
            .map(|e| {
                Ok(LilPoint {
                    checkpoint: e.checkpoint,
                    ones: e.ones,
                    s_star: s_star(e.ones, e.checkpoint)?,
                    s_lil: s_lil(e.ones, e.checkpoint)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn checkpoints(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|p| p.checkpoint)
    }

    pub fn s_lil_at(&self, checkpoint: u64) -> Option<T> {
        self.entries
            .iter()
            .find(|p| p.checkpoint == checkpoint)
            .map(|p| p.s_lil)
    }
}

/// Both sides of an additivity identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck<T> {
    pub lhs: T,
    pub rhs: T,
}

impl<T: Scalar> IdentityCheck<T> {
    pub fn residual(&self) -> T {
        (self.lhs - self.rhs).abs()
    }

    /// Residual relative to `max(1, |lhs|, |rhs|)`.
    pub fn relative_residual(&self) -> T {
        self.residual() / T::one().max(self.lhs.abs()).max(self.rhs.abs())
    }
}

fn part_bits(part: &[u8]) -> u64 {
    part.len() as u64 * 8
}

/// Equal-length additivity: `sum S_lil(x_i) = S_lil(x_1..x_t) * sqrt(t lnln(tn) / lnln n)`.
///
/// The left side is evaluated per part; the right side from the concatenation.
pub fn check_additivity<T: Scalar>(parts: &[&[u8]]) -> Result<IdentityCheck<T>> {
    let first = parts
        .first()
        .ok_or_else(|| LilError::Domain("no parts supplied".into()))?;
    let n = part_bits(first);
    if parts.iter().any(|p| part_bits(p) != n) {
        return Err(LilError::Domain("parts must share one length".into()));
    }
    let t = parts.len() as u64;

    let mut lhs = T::zero();
    for p in parts {
        lhs = lhs + s_lil::<T>(popcount(p), n)?;
    }
    let joined = parts.concat();
    let total = t * n;
    let (tf, nf) = (T::count(t), T::count(n));
    let rhs = s_lil::<T>(popcount(&joined), total)? * (tf * ln_ln(tf * nf) / ln_ln(nf)).sqrt();
    Ok(IdentityCheck { lhs, rhs })
}

/// Unequal-length additivity for `x1` of `s*n` bits and `x2` of `t*n` bits:
/// `S_lil(x1) sqrt(s lnln(sn)) + S_lil(x2) sqrt(t lnln(tn)) = S_lil(x1 x2) sqrt((s+t) lnln((s+t)n))`.
pub fn check_additivity_scaled<T: Scalar>(
    x1: &[u8],
    x2: &[u8],
    n: u64,
) -> Result<IdentityCheck<T>> {
    if n == 0 || x1.is_empty() || x2.is_empty() {
        return Err(LilError::Domain(
            "parts and unit length must be nonempty".into(),
        ));
    }
    let (b1, b2) = (part_bits(x1), part_bits(x2));
    if b1 % n != 0 || b2 % n != 0 {
        return Err(LilError::Domain(format!(
            "part lengths {b1} and {b2} are not multiples of {n}"
        )));
    }
    let (s, t) = (b1 / n, b2 / n);
    let nf = T::count(n);
    let weight = |k: u64| {
        let kf = T::count(k);
        (kf * ln_ln(kf * nf)).sqrt()
    };
    let lhs = s_lil::<T>(popcount(x1), b1)? * weight(s) + s_lil::<T>(popcount(x2), b2)? * weight(t);
    let joined = [x1, x2].concat();
    let rhs = s_lil::<T>(popcount(&joined), b1 + b2)? * weight(s + t);
    Ok(IdentityCheck { lhs, rhs })
}
