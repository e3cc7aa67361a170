//! Polar coordinates on the native disk and the hyperbolic law of cosines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Point on the native disk: hyperbolic distance `r` from the origin and an
/// angle normalised to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarCoord<F> {
    pub r: F,
    pub theta: F,
}

impl<F: Real> PolarCoord<F> {
    pub fn new(r: F, theta: F) -> Self {
        Self {
            r: r.max(F::zero()),
            theta: normalize_angle(theta),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.theta.is_finite()
    }

    /// Euclidean position of the native-disk picture.
    pub fn to_cartesian(&self) -> (F, F) {
        (self.r * self.theta.cos(), self.r * self.theta.sin())
    }
}

/// Curvature parameter `ζ = sqrt(-K)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvature<F>(F);

impl<F: Real> Curvature<F> {
    pub fn new(zeta: F) -> Result<Self> {
        if zeta > F::zero() && zeta.is_finite() {
            Ok(Self(zeta))
        } else {
            Err(Error::Parameter(format!("zeta must be > 0, got {zeta}")))
        }
    }

    pub fn zeta(self) -> F {
        self.0
    }
}

impl Default for Curvature<f64> {
    fn default() -> Self {
        Self(1.0)
    }
}

/// Maps any finite angle into `[0, 2π)`.
pub fn normalize_angle<F: Real>(theta: F) -> F {
    let tau = F::TAU();
    let t = theta % tau;
    let t = if t < F::zero() { t + tau } else { t };
    // `-tiny + 2π` can round up to exactly 2π
    if t >= tau {
        F::zero()
    } else {
        t
    }
}

/// `π - |π - |θi - θj||`, in `[0, π]` for normalised inputs.
pub fn angular_difference<F: Real>(theta_i: F, theta_j: F) -> F {
    let pi = F::PI();
    let d = (normalize_angle(theta_i) - normalize_angle(theta_j)).abs();
    pi - (pi - d).abs()
}

/// Hyperbolic distance from the law of cosines.
///
/// Uses `cosh(a-b) + 2 sinh(a) sinh(b) sin²(Δθ/2)`, which equals the usual
/// right-hand side but does not cancel catastrophically for nearby points.
pub fn hyperbolic_distance<F: Real>(a: PolarCoord<F>, b: PolarCoord<F>, zeta: Curvature<F>) -> F {
    let z = zeta.zeta();
    let dtheta = angular_difference(a.theta, b.theta);
    let za = z * a.r;
    let zb = z * b.r;
    let half = (dtheta * F::lit(0.5)).sin();
    let arg = (za - zb).cosh() + F::lit(2.0) * za.sinh() * zb.sinh() * half * half;
    acosh_clamped(arg) / z
}

/// Distance from scaled radii `ζr` and their precomputed `sinh`.
#[inline]
pub(crate) fn distance_from_parts<F: Real>(
    zr_a: F,
    sinh_a: F,
    zr_b: F,
    sinh_b: F,
    dtheta: F,
    inv_zeta: F,
) -> F {
    let half = (dtheta * F::lit(0.5)).sin();
    let arg = (zr_a - zr_b).cosh() + F::lit(2.0) * sinh_a * sinh_b * half * half;
    acosh_clamped(arg) * inv_zeta
}

#[inline]
pub(crate) fn acosh_clamped<F: Real>(arg: F) -> F {
    let arg = arg.max(F::one());
    // acosh loses precision near 1 through the sqrt; this form is exact there
    let t = arg - F::one();
    (t + (t * (t + F::lit(2.0))).sqrt()).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn z1() -> Curvature<f64> {
        Curvature::new(1.0).unwrap()
    }

    #[test]
    fn angular_difference_examples() {
        assert_relative_eq!(angular_difference(0.0, PI), PI);
        assert_relative_eq!(angular_difference(0.1, 2.0 * PI - 0.1), 0.2, epsilon = 1e-12);
        assert_eq!(angular_difference(1.3, 1.3), 0.0);
    }

    #[test]
    fn normalisation() {
        assert_relative_eq!(normalize_angle(-0.5), 2.0 * PI - 0.5);
        assert_relative_eq!(normalize_angle(7.0), 7.0 - 2.0 * PI);
        assert_eq!(normalize_angle(-1e-18f64), 0.0);
        let p = PolarCoord::new(1.0, -PI / 2.0);
        assert_relative_eq!(p.theta, 1.5 * PI);
    }

    #[test]
    fn distance_identity_origin_antipodal() {
        let a = PolarCoord::new(2.5, 1.0);
        assert_eq!(hyperbolic_distance(a, a, z1()), 0.0);
        let o = PolarCoord::new(0.0, 0.3);
        assert_relative_eq!(hyperbolic_distance(a, o, z1()), 2.5, epsilon = 1e-12);
        let b = PolarCoord::new(2.5, 1.0 + PI);
        assert_relative_eq!(hyperbolic_distance(a, b, z1()), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn distance_matches_high_precision_value() {
        // acosh(cosh2 cosh3 - sinh2 sinh3 cos1), 40-digit mpmath evaluation
        let expected = 3.596_312_534_033_742;
        let d = hyperbolic_distance(PolarCoord::new(2.0, 0.0), PolarCoord::new(3.0, 1.0), z1());
        assert_relative_eq!(d, expected, max_relative = 1e-14);
    }

    #[test]
    fn distance_in_f32() {
        let z = Curvature::new(1.0f32).unwrap();
        let d = hyperbolic_distance(PolarCoord::new(2.0f32, 0.0), PolarCoord::new(3.0, 1.0), z);
        assert!((d - 3.596_313).abs() < 1e-4);
    }

    #[test]
    fn curvature_must_be_positive() {
        assert!(Curvature::new(0.0).is_err());
        assert!(Curvature::new(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn symmetric(ra in 0.0..20.0f64, rb in 0.0..20.0f64, ta in 0.0..7.0f64, tb in 0.0..7.0f64) {
            let a = PolarCoord::new(ra, ta);
            let b = PolarCoord::new(rb, tb);
            prop_assert_eq!(hyperbolic_distance(a, b, z1()), hyperbolic_distance(b, a, z1()));
        }

        #[test]
        fn monotone_in_angle(ra in 0.1..15.0f64, rb in 0.1..15.0f64, t1 in 0.0..PI, t2 in 0.0..PI) {
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            let d_lo = hyperbolic_distance(PolarCoord::new(ra, 0.0), PolarCoord::new(rb, lo), z1());
            let d_hi = hyperbolic_distance(PolarCoord::new(ra, 0.0), PolarCoord::new(rb, hi), z1());
            prop_assert!(d_lo <= d_hi + 1e-12 * d_hi.max(1.0));
        }

        #[test]
        fn curvature_rescaling(ra in 0.0..10.0f64, rb in 0.0..10.0f64, ta in 0.0..7.0f64, tb in 0.0..7.0f64, zeta in 0.2..3.0f64) {
            let z = Curvature::new(zeta).unwrap();
            let lhs = hyperbolic_distance(PolarCoord::new(ra, ta), PolarCoord::new(rb, tb), z);
            let rhs = hyperbolic_distance(
                PolarCoord::new(zeta * ra, ta),
                PolarCoord::new(zeta * rb, tb),
                z1(),
            ) / zeta;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1.0));
        }

        #[test]
        fn parts_form_agrees(ra in 0.0..12.0f64, rb in 0.0..12.0f64, ta in 0.0..7.0f64, tb in 0.0..7.0f64) {
            let a = PolarCoord::new(ra, ta);
            let b = PolarCoord::new(rb, tb);
            let d = distance_from_parts(ra, ra.sinh(), rb, rb.sinh(), angular_difference(ta, tb), 1.0);
            let exact = hyperbolic_distance(a, b, z1());
            prop_assert!((d - exact).abs() <= 1e-12 * exact.max(1.0));
        }
    }
}
