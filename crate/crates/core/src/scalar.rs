//! Scalar abstraction for the rate formulas.
//!
//! Formulas are written once against [`Scalar`] and evaluated either exactly
//! with [`BigRational`] or approximately with `f32`/`f64`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + Clone + PartialOrd + Debug + FromPrimitive {
    fn from_bigint(v: &BigInt) -> Self;

    fn of(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 fits every scalar")
    }

    fn ratio(num: u64, den: u64) -> Self {
        Self::of(num) / Self::of(den)
    }
}

impl Scalar for f64 {
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Scalar for f32 {
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f32().unwrap_or(f32::INFINITY)
    }
}

impl Scalar for BigRational {
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_u64(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Renders an exact rational as `num/den`, or `num` when integral.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a/b` or `a` into a canonical rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Decimal rendering with `digits` fractional digits, rounding half to even.
/// Computed exactly from the rational, no floating point involved.
pub fn to_decimal(r: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let negative = r.is_negative();
    let abs = r.abs();
    let scaled_num = abs.numer() * &scale;
    let (mut q, rem) = scaled_num.div_rem(abs.denom());
    let twice = rem * 2u32;
    match twice.cmp(abs.denom()) {
        std::cmp::Ordering::Greater => q += 1u32,
        std::cmp::Ordering::Equal if q.is_odd() => q += 1u32,
        _ => {}
    }
    let (int, frac) = q.div_rem(&scale);
    let sign = if negative && !(int.is_zero() && frac.is_zero()) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{frac:0>width$}", width = digits as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("14/6"), Some(rational(7, 3)));
        assert_eq!(parse_rational(" 3 "), Some(rational(3, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&rational(10, 14)), "5/7");
        assert_eq!(format_rational(&rational(4, 2)), "2");
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(to_decimal(&rational(1, 3), 6), "0.333333");
        assert_eq!(to_decimal(&rational(2, 3), 6), "0.666667");
        // 0.0000005 ties to even (0), 0.0000015 ties to 2
        assert_eq!(to_decimal(&rational(1, 2_000_000), 6), "0.000000");
        assert_eq!(to_decimal(&rational(3, 2_000_000), 6), "0.000002");
        assert_eq!(to_decimal(&rational(5, 2), 0), "2");
        assert_eq!(to_decimal(&rational(-7, 4), 1), "-1.8");
        assert_eq!(to_decimal(&rational(79, 129), 6), "0.612403");
    }

    #[test]
    fn float_and_exact_agree() {
        let exact: BigRational = Scalar::ratio(7, 10);
        let approx: f64 = Scalar::ratio(7, 10);
        assert!((approx - 0.7).abs() < 1e-12);
        assert_eq!(exact, rational(7, 10));
    }
}
