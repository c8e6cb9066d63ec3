//! Numeric abstraction shared by the deterministic metrics.
//!
//! Efficiency, harmonic-mean normalization, the exact cascade oracle and the
//! closed-form design formulas are written once against [`Scalar`] and run on
//! `f32`, `f64` or exact [`BigRational`] values. Monte Carlo estimation is
//! inherently floating point and uses `f64` directly.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

/// A real-like number usable by the exact and closed-form metric code.
pub trait Scalar: Num + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync {
    /// Raise `self` to the attenuation exponent `exp`.
    ///
    /// Returns `None` when the result is not representable in this type,
    /// e.g. a non-integer power of an exact rational.
    fn pow_attenuation(&self, exp: &Self) -> Option<Self>;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy conversion used for reporting.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn pow_attenuation(&self, exp: &Self) -> Option<Self> {
        Some(self.powf(*exp))
    }
}

impl Scalar for f32 {
    fn pow_attenuation(&self, exp: &Self) -> Option<Self> {
        Some(self.powf(*exp))
    }
}

impl Scalar for BigRational {
    fn pow_attenuation(&self, exp: &Self) -> Option<Self> {
        if !exp.is_integer() {
            return None;
        }
        let e = exp.to_integer().to_i32()?;
        if self.is_zero() && e < 0 {
            return None;
        }
        Some(num_traits::Pow::pow(self, e))
    }
}

/// Exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `base^exp` for an integer base, the common case in hop-distance sums.
pub(crate) fn int_pow<T: Scalar>(base: usize, exp: &T) -> Option<T> {
    if base == 1 {
        return Some(T::one());
    }
    T::from_count(base).pow_attenuation(exp)
}

/// `1 / base^exp`; zero base is a caller bug.
pub(crate) fn inv_pow<T: Scalar>(base: T, exp: &T) -> Option<T> {
    let p = base.pow_attenuation(exp)?;
    if p.is_zero() {
        return None;
    }
    Some(T::one() / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rational_integer_powers_are_exact() {
        let half = ratio(1, 2);
        assert_eq!(half.pow_attenuation(&ratio(3, 1)), Some(ratio(1, 8)));
        assert_eq!(half.pow_attenuation(&ratio(-1, 1)), Some(ratio(2, 1)));
        assert_eq!(ratio(3, 1).pow_attenuation(&ratio(0, 1)), Some(BigRational::one()));
    }

    #[test]
    fn rational_fractional_power_is_rejected() {
        assert_eq!(ratio(2, 1).pow_attenuation(&ratio(1, 2)), None);
        assert_eq!(ratio(0, 1).pow_attenuation(&ratio(-1, 1)), None);
    }

    #[test]
    fn float_powers() {
        assert_eq!(2.0f64.pow_attenuation(&0.5), Some(2.0f64.sqrt()));
        assert_eq!(4.0f32.pow_attenuation(&0.5), Some(2.0));
        assert_eq!(inv_pow(4.0f64, &1.0), Some(0.25));
        assert_eq!(int_pow::<f64>(1, &7.3), Some(1.0));
    }
}
