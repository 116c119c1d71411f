//! Exact rational helpers shared across the toolkit.
//!
//! Invariant values live in dyadic rationals, geometry parameters in plain
//! rationals; everything user-facing is rendered in `p/q` form.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Parses a rational from `p/q` or plain integer form.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::InvalidParameter(format!("invalid integer `{t}`")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(parse_int(num)?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Renders a rational as `p/q` (or `p` for integers).
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    bigint_to_f64(r.numer()) / bigint_to_f64(r.denom())
}

pub fn bigint_to_f64(i: &BigInt) -> f64 {
    // Good enough for the magnitudes appearing here; exact for small values.
    i.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

pub fn ratio64_to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `1 / 2^e` as an exact rational.
pub fn inverse_power_of_two(e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2u32).pow(e))
}

/// True iff the denominator (in lowest terms) is a power of two.
pub fn denominator_is_power_of_two(r: &BigRational) -> bool {
    let mut d = r.denom().abs();
    let two = BigInt::from(2u32);
    while (&d % &two).is_zero() {
        d /= &two;
    }
    d.is_one()
}

/// Serde adapter rendering `Rational64` as a `p/q` string.
pub mod serde_ratio64 {
    use super::*;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
        r.to_string().serialize(s)
    }
}

/// Serde adapter rendering `BigRational` as a `p/q` string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        format_rational(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        let r = parse_rational("-5/4").unwrap();
        assert_eq!(format_rational(&r), "-5/4");
        assert_eq!(format_rational(&parse_rational("0").unwrap()), "0");
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn dyadic_detection() {
        assert!(denominator_is_power_of_two(&parse_rational("-5/4").unwrap()));
        assert!(denominator_is_power_of_two(&parse_rational("3").unwrap()));
        assert!(!denominator_is_power_of_two(&parse_rational("1/6").unwrap()));
    }
}
