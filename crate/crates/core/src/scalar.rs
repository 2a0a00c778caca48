//! Numeric backends.
//!
//! Every structure in the crate is generic over a [`Scalar`]. Two kinds of
//! backend exist: exact rationals ([`Rational`]), where every comparison is
//! decided exactly, and IEEE floats (`f64`, `f32`), where equality means
//! `|a - b| <= tolerance`.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number used by the exact backend.
pub type Rational = BigRational;

/// Default equality tolerance of the `f64` backend.
pub const DEFAULT_F64_TOLERANCE: f64 = 1e-9;

/// Equality tolerance of the `f32` backend.
pub const F32_TOLERANCE: f32 = 1e-5;

static F64_TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Overrides the process-wide `f64` tolerance. Non-positive or non-finite
/// values are ignored.
pub fn set_f64_tolerance(tol: f64) {
    if tol.is_finite() && tol > 0.0 {
        F64_TOLERANCE_BITS.store(tol.to_bits(), Ordering::Relaxed);
    }
}

/// Current `f64` tolerance.
pub fn f64_tolerance() -> f64 {
    f64::from_bits(F64_TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// A real number backend.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// True when arithmetic and comparison are exact.
    const EXACT: bool;
    /// Backend name as accepted by `CATPROB_BACKEND`.
    const NAME: &'static str;

    fn from_ratio(num: i64, den: u64) -> Self;

    /// Absolute tolerance used by [`Scalar::approx_eq`]; zero for exact backends.
    fn tolerance() -> Self;

    fn to_f64(&self) -> f64;

    /// Parses `"n/d"`, an integer, or a decimal literal such as `"0.125"`.
    fn parse_literal(s: &str) -> Option<Self>;

    /// Text form that [`Scalar::parse_literal`] reads back to the same value.
    fn to_literal(&self) -> String;

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.clone() - other.clone()).abs() <= Self::tolerance()
        }
    }

    fn approx_le(&self, other: &Self) -> bool {
        if Self::EXACT {
            self <= other
        } else {
            *self <= other.clone() + Self::tolerance()
        }
    }

    fn approx_zero(&self) -> bool {
        self.approx_eq(&Self::zero())
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    /// Positive part `max(self, 0)`.
    fn pos_part(&self) -> Self {
        Self::max_of(self.clone(), Self::zero())
    }
}

/// Sum of an iterator of scalars.
pub fn sum<S: Scalar, I: IntoIterator<Item = S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}

/// Maximum of an iterator of scalars, `zero` when empty.
pub fn max_or_zero<S: Scalar, I: IntoIterator<Item = S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), S::max_of)
}

fn split_ratio(s: &str) -> Option<(&str, Option<&str>)> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => Some((n.trim(), Some(d.trim()))),
        None => Some((s, None)),
    }
}

fn parse_decimal_rational(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all.parse().ok()?;
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn from_ratio(num: i64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let (n, d) = split_ratio(s)?;
        match d {
            Some(d) => {
                let n: BigInt = n.parse().ok()?;
                let d: BigInt = d.parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(BigRational::new(n, d))
            }
            None => parse_decimal_rational(n),
        }
    }

    fn to_literal(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

macro_rules! float_scalar {
    ($t:ty, $name:expr, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            const NAME: &'static str = $name;

            fn from_ratio(num: i64, den: u64) -> Self {
                (num as f64 / den as f64) as $t
            }

            fn tolerance() -> Self {
                $tol
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn parse_literal(s: &str) -> Option<Self> {
                let (n, d) = split_ratio(s)?;
                match d {
                    Some(d) => {
                        let n: f64 = n.parse().ok()?;
                        let d: f64 = d.parse().ok()?;
                        if d == 0.0 {
                            return None;
                        }
                        Some((n / d) as $t)
                    }
                    None => n.parse().ok(),
                }
            }

            fn to_literal(&self) -> String {
                // Display for floats is the shortest text that parses back exactly.
                format!("{}", self)
            }
        }
    };
}

float_scalar!(f64, "f64", f64_tolerance());
float_scalar!(f32, "f32", F32_TOLERANCE);

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        Rational::parse_literal(s).unwrap()
    }

    #[test]
    fn rational_literals() {
        assert_eq!(q("1/4"), Rational::from_ratio(1, 4));
        assert_eq!(q("2/8").to_literal(), "1/4");
        assert_eq!(q("3").to_literal(), "3");
        assert_eq!(q("0.125"), Rational::from_ratio(1, 8));
        assert_eq!(q("-1.5e1"), Rational::from_ratio(-15, 1));
        assert_eq!(q("2.5e-1"), Rational::from_ratio(1, 4));
        assert!(Rational::parse_literal("1/0").is_none());
        assert!(Rational::parse_literal("abc").is_none());
        assert!(Rational::parse_literal("").is_none());
    }

    #[test]
    fn float_literals() {
        assert_eq!(f64::parse_literal("1/4"), Some(0.25));
        assert_eq!(f64::parse_literal("0.1"), Some(0.1));
        let x = 0.1f64 + 0.2;
        assert_eq!(f64::parse_literal(&x.to_literal()), Some(x));
        assert_eq!(f32::parse_literal("3/4"), Some(0.75f32));
    }

    #[test]
    fn tolerance_semantics() {
        assert!(1.0f64.approx_eq(&(1.0 + 1e-12)));
        assert!(!1.0f64.approx_eq(&(1.0 + 1e-6)));
        assert!(!q("1/3").approx_eq(&q("333333333/1000000000")));
        assert!(q("1/3").approx_le(&q("1/3")));
        assert_eq!(DEFAULT_F64_TOLERANCE, f64_tolerance());
    }

    #[test]
    fn pos_part_and_helpers() {
        assert_eq!(q("-2").pos_part(), q("0"));
        assert_eq!(q("3/2").pos_part(), q("3/2"));
        assert_eq!(sum(vec![q("1/4"), q("3/4")]), q("1"));
        assert_eq!(max_or_zero(Vec::<Rational>::new()), q("0"));
    }
}
