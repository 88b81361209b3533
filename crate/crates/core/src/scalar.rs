//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type the statistics and probability engine are generic over.
///
/// Implemented for `f32` and `f64`. The complementary error function is the one
/// special function the crate needs beyond what [`Float`] provides; it is backed
/// by the fdlibm rational approximations in `libm`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Complementary error function `erfc(x) = 1 - erf(x)`.
    fn erfc(self) -> Self;

    /// Absolute tolerance used per one-dimensional integral.
    fn quadrature_tolerance() -> Self;

    /// Converts an `f64` literal. Literals in this crate are always representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Converts an integer bit count (exact for `f64` up to 2^53).
    #[inline]
    fn count(n: u64) -> Self {
        Self::from_u64(n).expect("integer fits in a float")
    }
}

impl Scalar for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }

    fn quadrature_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }

    fn quadrature_tolerance() -> Self {
        1e-6
    }
}

/// `ln ln n` for a bit count `n`.
#[inline]
pub fn ln_ln<T: Scalar>(n: T) -> T {
    n.ln().ln()
}
