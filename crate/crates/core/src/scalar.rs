//! Scalar types used by the numeric engines.
//!
//! Everything that does interval sweeps, linear algebra, sampling or descent is
//! written against [`Scalar`], so the same code runs over exact rationals (the
//! reference path) and binary floats (the approximate path).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Relative tolerance for float comparisons.
pub const REL_TOL: f64 = 1e-9;
/// Absolute tolerance for float comparisons.
pub const ABS_TOL: f64 = 1e-12;

/// A number type the engines can compute with.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality, up to [`REL_TOL`]/[`ABS_TOL`] for inexact types.
    fn approx_eq(&self, other: &Self) -> bool;

    fn midpoint(a: &Self, b: &Self) -> Self {
        (a.clone() + b.clone()) / (Self::one() + Self::one())
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn approx_eq(&self, other: &Self) -> bool {
        float_close(*self, *other, 0.0)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f32(r).unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-5 * self.abs().max(other.abs()) + 1e-7
    }
}

/// `|a - b| <= ABS_TOL + REL_TOL * max(|a|, |b|, scale)`.
///
/// `scale` lets a caller widen the band to the magnitude of the operands that
/// produced `a` and `b`, which matters when the results cancelled.
pub fn float_close(a: f64, b: f64, scale: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= ABS_TOL + REL_TOL * a.abs().max(b.abs()).max(scale.abs())
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `12`, `-3`, `0.25`, `3/10` or `1e-3` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = format!("{whole}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with up to 12 significant digits.
pub fn fmt_decimal(r: &BigRational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    fmt_float(Scalar::to_f64(r))
}

/// A decimal when one with at most 12 significant digits is exact, else `n/d`.
pub fn fmt_number(r: &BigRational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let s = fmt_float(Scalar::to_f64(r));
    if parse_rational(&s).as_ref() == Some(r) {
        s
    } else {
        fmt_rational(r)
    }
}

/// `x` rounded to 12 significant digits; `None` for NaN and infinities.
pub fn round_float(x: f64) -> Option<BigRational> {
    parse_rational(&fmt_float(x))
}

pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.11e}", x);
    let v: f64 = s.parse().unwrap_or(x);
    let mut out = if v != 0.0 && (v.abs() < 1e-6 || v.abs() >= 1e16) {
        format!("{:e}", v)
    } else {
        format!("{}", v)
    };
    if out == "-0" {
        out = "0".into();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.6"), Some(rat(3, 5)));
        assert_eq!(parse_rational("2.5"), Some(rat(5, 2)));
        assert_eq!(parse_rational("-3"), Some(int(-3)));
        assert_eq!(parse_rational("3/10"), Some(rat(3, 10)));
        assert_eq!(parse_rational("1e-3"), Some(rat(1, 1000)));
        assert_eq!(parse_rational(".5"), Some(rat(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn formats() {
        assert_eq!(fmt_rational(&rat(3, 10)), "3/10");
        assert_eq!(fmt_decimal(&rat(3, 10)), "0.3");
        assert_eq!(fmt_decimal(&rat(1, 3)), "0.333333333333");
        assert_eq!(fmt_rational(&int(6)), "6");
        assert_eq!(fmt_float(8.678086255e-28), "8.678086255e-28");
        assert_eq!(fmt_float(-0.0), "0");
        assert_eq!(fmt_number(&rat(5, 2)), "2.5");
        assert_eq!(fmt_number(&rat(1, 3)), "1/3");
        assert_eq!(round_float(0.1 + 0.2), Some(rat(3, 10)));
    }

    #[test]
    fn float_tolerance() {
        assert!(float_close(0.1 + 0.2, 0.3, 0.0));
        assert!(!float_close(1.0, 1.001, 0.0));
        assert!(float_close(1.0, 0.0, 1e16));
    }
}
