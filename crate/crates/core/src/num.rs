//! Exact rational helpers shared by scoring and triage.
//!
//! Scores, coverage, weights and thresholds are kept as exact rationals so
//! that ties and comparisons never depend on floating point rounding. JSON
//! carries them as ordinary numbers; a decimal literal such as `0.1` is read
//! back as exactly `1/10`.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

/// Parses a JSON-style decimal literal (`12`, `-0.25`, `1e-3`) into an exact
/// rational. Returns `None` for malformed input or values that do not fit.
pub fn parse_decimal(literal: &str) -> Option<Rational64> {
    let s = literal.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    let mut numer: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    if negative {
        numer = -numer;
    }
    let scale = exponent - i32::try_from(frac_part.len()).ok()?;
    let pow = 10i64.checked_pow(scale.unsigned_abs())?;
    if scale >= 0 {
        Some(Rational64::from_integer(numer.checked_mul(pow)?))
    } else {
        Some(Rational64::new(numer, pow))
    }
}

pub fn to_f64(value: &Rational64) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn big_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn to_big(value: &Rational64) -> BigRational {
    BigRational::new(BigInt::from(*value.numer()), BigInt::from(*value.denom()))
}

/// Renders a rational as `n/d`, or `n` when the denominator is one.
pub fn exact_string(value: &Rational64) -> String {
    if *value.denom() == 1 {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn big_exact_string(value: &BigRational) -> String {
    if value.denom() == &BigInt::from(1) {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses the output of [`exact_string`].
pub fn parse_exact(text: &str) -> Option<Rational64> {
    match text.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational64::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rational64::from_integer(text.trim().parse().ok()?)),
    }
}

pub fn parse_big_exact(text: &str) -> Option<BigRational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(text.trim().parse().ok()?)),
    }
}

/// Serde adapter: a rational written as a JSON number.
pub mod decimal {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational64, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(to_f64(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational64, D::Error> {
        let number = serde_json::Number::deserialize(deserializer)?;
        parse_decimal(&number.to_string())
            .ok_or_else(|| D::Error::custom(format!("number {number} is not representable")))
    }
}
