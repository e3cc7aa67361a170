use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the geometry and likelihood code is written against.
///
/// Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest probability kept away from zero when taking logarithms.
    #[inline]
    fn prob_floor() -> Self {
        Self::min_positive_value().max(Self::lit(1e-300))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub(crate) fn softplus<F: Real>(x: F) -> F {
    if x > F::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `1 / (1 + e^x)` without overflow.
#[inline]
pub(crate) fn logistic_tail<F: Real>(x: F) -> F {
    if x > F::zero() {
        let e = (-x).exp();
        e / (F::one() + e)
    } else {
        F::one() / (F::one() + x.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_is_finite_at_extremes() {
        assert_eq!(softplus(1000.0f64), 1000.0);
        assert!(softplus(-1000.0f64) >= 0.0);
        assert!((softplus(0.0f64) - 2f64.ln()).abs() < 1e-15);
        assert!(softplus(200.0f32).is_finite());
    }

    #[test]
    fn logistic_tail_midpoint_and_limits() {
        assert_eq!(logistic_tail(0.0f64), 0.5);
        assert_eq!(logistic_tail(1e6f64), 0.0);
        assert_eq!(logistic_tail(-1e6f64), 1.0);
    }

    #[test]
    fn prob_floor_positive_for_both_widths() {
        assert!(f32::prob_floor() > 0.0);
        assert!(f64::prob_floor() > 0.0 && f64::prob_floor() <= 1e-300);
        assert!(f64::prob_floor().ln().is_finite());
    }
}
