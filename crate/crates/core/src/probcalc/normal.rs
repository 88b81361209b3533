//! Standard normal density and distribution function.

use crate::scalar::Scalar;

/// Standard normal density `phi(x) = exp(-x^2/2) / sqrt(2 pi)`.
#[inline]
pub fn pdf<T: Scalar>(x: T) -> T {
    (-(x * x) / T::lit(2.0)).exp() / (T::TAU()).sqrt()
}

/// Standard normal CDF `Phi(x)`, via `Phi(x) = erfc(-x / sqrt 2) / 2`.
#[inline]
pub fn cdf<T: Scalar>(x: T) -> T {
    T::lit(0.5) * (-x * T::FRAC_1_SQRT_2()).erfc()
}

/// Upper tail `1 - Phi(x)`, accurate far into the tail.
#[inline]
pub fn sf<T: Scalar>(x: T) -> T {
    T::lit(0.5) * (x * T::FRAC_1_SQRT_2()).erfc()
}

/// Mills-ratio sandwich `((1/x - 1/x^3) phi(x), phi(x)/x)` around `1 - Phi(x)`, for `x > 0`.
pub fn tail_bounds<T: Scalar>(x: T) -> (T, T) {
    let p = pdf(x);
    ((x.recip() - x.powi(-3)) * p, p / x)
}
