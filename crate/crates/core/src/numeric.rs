//! Floating-point scalars used by the numeric layer: plain `f64` for the
//! integrator and a decimal arbitrary-precision type for spot checks.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_float::DBig;
use num_traits::{ToPrimitive, Zero};

use crate::Rational;

/// Default number of significant decimal digits for [`HpFloat`].
pub const DEFAULT_PRECISION: usize = 40;

/// Environment variable overriding [`DEFAULT_PRECISION`].
pub const PRECISION_ENV: &str = "SIFLOW_PRECISION";

/// Reads the working precision from `SIFLOW_PRECISION`, falling back to the default.
pub fn precision_from_env() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&d| d >= 10)
        .unwrap_or(DEFAULT_PRECISION)
}

/// Real scalar abstraction over `f64` and [`HpFloat`].
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Precision context (number of decimal digits for `HpFloat`, unit for `f64`).
    type Ctx: Copy + fmt::Debug + Send + Sync;

    fn from_rational(r: &Rational, ctx: Self::Ctx) -> Self;
    fn from_f64(x: f64, ctx: Self::Ctx) -> Self;
    fn sqrt(&self) -> Self;
    fn to_f64(&self) -> f64;

    fn from_i64(x: i64, ctx: Self::Ctx) -> Self {
        Self::from_rational(&Rational::from_integer(x.into()), ctx)
    }

    fn abs(&self) -> Self {
        if self.is_negative_value() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_negative_value(&self) -> bool;
    fn is_positive_value(&self) -> bool;
}

impl Scalar for f64 {
    type Ctx = ();

    fn from_rational(r: &Rational, _: ()) -> f64 {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64, _: ()) -> f64 {
        x
    }
    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negative_value(&self) -> bool {
        *self < 0.0
    }
    fn is_positive_value(&self) -> bool {
        *self > 0.0
    }
}

/// Decimal floating-point number carrying an explicit working precision.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct HpFloat(DBig);

impl HpFloat {
    fn with_digits(v: DBig, digits: usize) -> HpFloat {
        HpFloat(v.with_precision(digits).value())
    }

    pub fn parse(s: &str, digits: usize) -> Option<HpFloat> {
        DBig::from_str(s)
            .ok()
            .map(|v| HpFloat::with_digits(v, digits))
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn inner(&self) -> &DBig {
        &self.0
    }
}

impl fmt::Display for HpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Scalar for HpFloat {
    type Ctx = usize;

    fn from_rational(r: &Rational, digits: usize) -> HpFloat {
        let num = HpFloat::with_digits(
            DBig::from_str(&r.numer().to_string()).expect("integer literal"),
            digits,
        );
        if r.denom().to_string() == "1" {
            return num;
        }
        let den = HpFloat::with_digits(
            DBig::from_str(&r.denom().to_string()).expect("integer literal"),
            digits,
        );
        num / den
    }

    fn from_f64(x: f64, digits: usize) -> HpFloat {
        // f64 values are dyadic, so the conversion through a rational is exact
        let r = Rational::from_float(x).unwrap_or_else(Rational::zero);
        HpFloat::from_rational(&r, digits)
    }

    fn sqrt(&self) -> HpFloat {
        if self.0 == DBig::ZERO {
            return self.clone();
        }
        HpFloat(self.0.sqrt())
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn is_negative_value(&self) -> bool {
        self.0 < DBig::ZERO
    }

    fn is_positive_value(&self) -> bool {
        self.0 > DBig::ZERO
    }
}

impl Add for HpFloat {
    type Output = HpFloat;
    fn add(self, rhs: HpFloat) -> HpFloat {
        HpFloat(self.0 + rhs.0)
    }
}

impl Sub for HpFloat {
    type Output = HpFloat;
    fn sub(self, rhs: HpFloat) -> HpFloat {
        HpFloat(self.0 - rhs.0)
    }
}

impl Mul for HpFloat {
    type Output = HpFloat;
    fn mul(self, rhs: HpFloat) -> HpFloat {
        HpFloat(self.0 * rhs.0)
    }
}

impl Div for HpFloat {
    type Output = HpFloat;
    fn div(self, rhs: HpFloat) -> HpFloat {
        HpFloat(self.0 / rhs.0)
    }
}

impl Neg for HpFloat {
    type Output = HpFloat;
    fn neg(self) -> HpFloat {
        HpFloat(-self.0)
    }
}

/// Convenience: `10^-k` as an `f64` threshold comparison on an `HpFloat`.
pub fn below_threshold(x: &HpFloat, threshold: f64) -> bool {
    x.abs().to_f64() < threshold
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forty_digit_sqrt() {
        let two = HpFloat::from_i64(2, 40);
        let r = two.sqrt();
        let back = r.clone() * r.clone() - HpFloat::from_i64(2, 40);
        assert!(back.abs().to_f64() < 1e-38, "{back}");
        assert_eq!(r.precision(), 40);
    }

    #[test]
    fn rational_conversion_keeps_precision() {
        let third = HpFloat::from_rational(&Rational::new(1.into(), 3.into()), 45);
        let err = third * HpFloat::from_i64(3, 45) - HpFloat::from_i64(1, 45);
        assert!(err.abs().to_f64() < 1e-43);
        assert!(!err.is_positive_value() || err.to_f64() < 1e-43);
    }

    #[test]
    fn f64_scalar_roundtrip() {
        let x = <f64 as Scalar>::from_rational(&Rational::new(3.into(), 4.into()), ());
        assert_eq!(x, 0.75);
        let y = HpFloat::from_f64(0.1, 30);
        assert!((y.to_f64() - 0.1).abs() < 1e-17);
    }
}
