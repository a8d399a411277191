//! Exact rational numbers and their textual form.
//!
//! Weights, gate parameters and outcome coefficients are all
//! [`BigRational`]s. The text form is `"p"` or `"p/q"` in decimal digits
//! with an optional leading `-`; it is what the JSON documents carry.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Parses `"p"` or `"p/q"`. A zero denominator is rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::BadRational(s.to_string());
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let unsigned = num.strip_prefix('-').unwrap_or(num);
    if !digits(unsigned) {
        return Err(bad());
    }
    let numer: BigInt = num.parse().map_err(|_| bad())?;
    let denom: BigInt = match den {
        Some(d) if digits(d) => d.parse().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

/// Lowest-terms text form; integers print without a denominator.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Fallback for ratios whose parts overflow f64 individually.
        let sign = if r.is_negative() { -1.0 } else { 1.0 };
        let n = r.numer().abs().to_string();
        let d = r.denom().to_string();
        let shift = n.len().min(d.len()).saturating_sub(15);
        let nf: f64 = n[..n.len() - shift].parse().unwrap_or(f64::INFINITY);
        let df: f64 = d[..d.len() - shift].parse().unwrap_or(f64::INFINITY);
        sign * nf / df
    })
}

/// Serde adapter storing a rational as its text form.
pub mod serde_text {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("0/7").unwrap(), int(0));
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "-", "1/0", "+1", "1.5", "1/-2", "a", "1/", "/2", " 1"] {
            assert!(parse_rational(s).is_err(), "{s:?} accepted");
        }
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format_rational(&rat(4, -6)), "-2/3");
        assert_eq!(format_rational(&rat(10, 5)), "2");
    }

    #[test]
    fn float_conversion() {
        assert_eq!(to_f64(&rat(-3, 4)), -0.75);
    }
}
