//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate falls below the absolute tolerance. The estimate is the plain
//! difference between the 15-point Kronrod and embedded 7-point Gauss rules.

use crate::error::{LilError, Result};
use crate::scalar::Scalar;

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

/// Gauss weights for Kronrod nodes 1, 3, 5 and the centre.
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Subinterval budget before giving up.
pub const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
}

#[derive(Clone, Copy)]
struct Piece<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn kronrod_15<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Piece<T> {
    let half = (b - a) / T::lit(2.0);
    let centre = (a + b) / T::lit(2.0);
    let fc = f(centre);
    let mut kronrod = fc * T::lit(KRONROD_WEIGHTS[7]);
    let mut gauss = fc * T::lit(GAUSS_WEIGHTS[3]);
    for j in 0..7 {
        let dx = half * T::lit(KRONROD_NODES[j]);
        let pair = f(centre - dx) + f(centre + dx);
        kronrod = kronrod + pair * T::lit(KRONROD_WEIGHTS[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(GAUSS_WEIGHTS[j / 2]);
        }
    }
    Piece {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over the finite interval `[a, b]` to absolute tolerance `tol`.
pub fn integrate<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<Integral<T>> {
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(LilError::Domain("integration limits must be finite".into()));
    }
    if b < a {
        let r = integrate(f, b, a, tol)?;
        return Ok(Integral {
            value: -r.value,
            error: r.error,
        });
    }

    let mut pieces = vec![kronrod_15(&f, a, b)];
    loop {
        let (value, error) = pieces.iter().fold((T::zero(), T::zero()), |(v, e), p| {
            (v + p.value, e + p.error)
        });
        if !(value.is_finite() && error.is_finite()) {
            return Err(LilError::Numerical {
                context: format!("quadrature on [{a}, {b}] produced a non-finite value"),
                residual: f64::INFINITY,
                tolerance: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        if error <= tol {
            return Ok(Integral { value, error });
        }
        // Bisection can no longer shrink the error below rounding noise.
        let floor = T::epsilon() * T::lit(50.0) * value.abs();
        if error <= floor {
            return Ok(Integral { value, error });
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(LilError::Numerical {
                context: format!("quadrature on [{a}, {b}]"),
                residual: error.to_f64().unwrap_or(f64::NAN),
                tolerance: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).expect("finite error"))
            .map(|(i, _)| i)
            .expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = (p.a + p.b) / T::lit(2.0);
        pieces.push(kronrod_15(&f, p.a, mid));
        pieces.push(kronrod_15(&f, mid, p.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcalc::normal;

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = 2.0 * KRONROD_WEIGHTS[..7].iter().sum::<f64>() + KRONROD_WEIGHTS[7];
        let g: f64 = 2.0 * GAUSS_WEIGHTS[..3].iter().sum::<f64>() + GAUSS_WEIGHTS[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_panel_is_exact_for_low_degree_polynomials() {
        // Kronrod-15 integrates degree 22 exactly, Gauss-7 degree 13.
        for deg in 0..=22 {
            let p = kronrod_15(&|x: f64| x.powi(deg), -1.0, 1.0);
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert!((p.value - exact).abs() < 1e-14, "degree {deg}");
            if deg <= 13 {
                assert!(p.error < 1e-14, "gauss degree {deg}");
            }
        }
    }

    #[test]
    fn gaussian_mass() {
        let r = integrate(normal::pdf::<f64>, -9.0, 9.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        let r = integrate(normal::pdf::<f64>, 1.0, 9.0, 1e-12).unwrap();
        assert!((r.value - normal::sf(1.0)).abs() < 1e-13);
    }

    #[test]
    fn reversed_and_empty_limits() {
        let r = integrate(|x: f64| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((r.value + 0.5).abs() < 1e-15);
        assert_eq!(integrate(|x: f64| x, 1.0, 1.0, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn non_convergence_reports_residual() {
        // The integrand is singular at the origin with a barely integrable pole.
        let err = integrate(
            |x: f64| if x == 0.0 { 0.0 } else { x.abs().powf(-0.999) },
            -1.0,
            1.0,
            1e-30,
        )
        .unwrap_err();
        assert!(matches!(err, LilError::Numerical { residual, .. } if residual > 1e-30));
        let err = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-9).unwrap_err();
        assert!(matches!(err, LilError::Numerical { .. }));
    }
}
