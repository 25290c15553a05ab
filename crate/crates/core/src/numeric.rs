//! Exact rational arithmetic and deterministic decimal formatting.
//!
//! All supports, confidences and lifts are kept as exact `Ratio<i64>`
//! values internally; floats only appear at serialization boundaries.

use num::rational::Ratio;
use num::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational used for every mined statistic.
pub type Rational = Ratio<i64>;

/// Builds a rational from a count over a total, panicking only on a zero total.
pub fn ratio(numerator: u64, denominator: u64) -> Rational {
    Ratio::new(numerator as i64, denominator as i64)
}

/// Formats `value` with exactly `digits` fractional digits, rounding
/// half-to-even. The computation is exact: the rational is scaled by
/// 10^digits in 128-bit integers, so the printed string never depends on
/// float rounding.
pub fn format_decimal(value: Rational, digits: u32) -> String {
    let numer = *value.numer() as i128;
    let denom = *value.denom() as i128; // Ratio keeps the denominator positive
    let scale = 10i128.pow(digits);
    let scaled = numer * scale;
    let mut quot = scaled.div_euclid(denom);
    let rem = scaled.rem_euclid(denom);
    // round half to even on the remainder
    let twice = rem * 2;
    if twice > denom || (twice == denom && quot % 2 != 0) {
        quot += 1;
    }
    let negative = quot < 0;
    let magnitude = quot.unsigned_abs();
    let int_part = magnitude / scale.unsigned_abs();
    let frac_part = magnitude % scale.unsigned_abs();
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{frac_part:0width$}",
            width = digits as usize
        )
    }
}

/// Lossy float view of a rational, for serialization alongside the exact form.
pub fn to_f64(value: Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Parses a rational from either a `numerator/denominator` pair or a plain
/// decimal string (`"0.01"` becomes exactly 1/100).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let numer: i64 = num
            .trim()
            .parse()
            .map_err(|_| Error::invalid_param(format!("bad rational numerator in {text:?}")))?;
        let denom: i64 = den
            .trim()
            .parse()
            .map_err(|_| Error::invalid_param(format!("bad rational denominator in {text:?}")))?;
        if denom == 0 {
            return Err(Error::invalid_param(format!("zero denominator in {text:?}")));
        }
        return Ok(Ratio::new(numer, denom));
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Result<Rational> {
    let bad = || Error::invalid_param(format!("cannot parse {text:?} as a rational"));
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, text),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    if frac_part.len() > 18 {
        return Err(Error::invalid_param(format!(
            "more than 18 fractional digits in {text:?}"
        )));
    }
    let int_value: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let scale = 10i64.pow(frac_part.len() as u32);
    let frac_value: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| bad())?
    };
    let numer = int_value
        .checked_mul(scale)
        .and_then(|v| v.checked_add(frac_value))
        .ok_or_else(bad)?;
    Ok(Ratio::new(sign * numer, scale))
}

/// Exact rational alongside its float view, for JSON exports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalJson {
    pub numerator: i64,
    pub denominator: i64,
    pub value: f64,
}

impl From<Rational> for RationalJson {
    fn from(r: Rational) -> Self {
        RationalJson {
            numerator: *r.numer(),
            denominator: *r.denom(),
            value: to_f64(r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_table_style_values() {
        assert_eq!(format_decimal(ratio(9, 616), 9), "0.014610390");
        assert_eq!(format_decimal(ratio(7, 616), 9), "0.011363636");
        assert_eq!(format_decimal(ratio(5, 616), 9), "0.008116883");
        assert_eq!(format_decimal(ratio(4, 616), 9), "0.006493506");
        assert_eq!(format_decimal(ratio(9, 10), 7), "0.9000000");
        assert_eq!(format_decimal(Ratio::new(5, 7), 7), "0.7142857");
        assert_eq!(format_decimal(Ratio::new(616, 422), 7), "1.4597156");
    }

    #[test]
    fn rounds_half_to_even() {
        assert_eq!(format_decimal(Ratio::new(1, 8), 2), "0.12"); // 0.125 -> even 0.12
        assert_eq!(format_decimal(Ratio::new(3, 8), 2), "0.38"); // 0.375 -> even 0.38
        assert_eq!(format_decimal(Ratio::new(-1, 8), 2), "-0.12");
        assert_eq!(format_decimal(Ratio::new(25, 1000), 2), "0.02");
        assert_eq!(format_decimal(Ratio::new(35, 1000), 2), "0.04");
    }

    #[test]
    fn formats_whole_numbers_and_zero_digits() {
        assert_eq!(format_decimal(ratio(3, 1), 2), "3.00");
        assert_eq!(format_decimal(ratio(0, 5), 9), "0.000000000");
        assert_eq!(format_decimal(Ratio::new(3, 2), 0), "2"); // 1.5 -> even 2
        assert_eq!(format_decimal(Ratio::new(5, 2), 0), "2"); // 2.5 -> even 2
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("4/616").unwrap(), Ratio::new(4, 616));
        assert_eq!(parse_rational("0.01").unwrap(), Ratio::new(1, 100));
        assert_eq!(parse_rational("0.3").unwrap(), Ratio::new(3, 10));
        assert_eq!(parse_rational("1").unwrap(), Ratio::new(1, 1));
        assert_eq!(parse_rational(".5").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), Ratio::new(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }
}
