//! Exact rational helpers shared by every solver path.
//!
//! The canonical number type is [`Rational`], an arbitrary-precision ratio
//! kept in lowest terms with a positive denominator. In files rationals are
//! written either as JSON numbers (integers or decimals, parsed exactly) or as
//! `"p/q"` strings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use std::fmt;
use std::str::FromStr;

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn is_integral(x: &Rational) -> bool {
    x.is_integer()
}

/// Integer value of an integral rational, if it fits in `i64`.
pub fn to_i64(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

pub fn floor(x: &Rational) -> Rational {
    x.floor()
}

pub fn ceil(x: &Rational) -> Rational {
    x.ceil()
}

/// Distance from `x` up to the next integer (0 when integral).
pub fn up_gap(x: &Rational) -> Rational {
    x.ceil() - x
}

/// Distance from `x` down to the previous integer (0 when integral).
pub fn down_gap(x: &Rational) -> Rational {
    x - x.floor()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, `"-7"`, or a decimal such as `"0.125"` / `"1e-3"` exactly.
pub fn parse(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let joined = format!("{whole}{frac}");
    let mut value = Rational::from_integer(BigInt::from_str(&joined).map_err(|_| err())?);
    let scale = exponent - frac.len() as i64;
    if exponent.unsigned_abs() > 10_000 {
        return Err(err());
    }
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Canonical text form: `"p/q"` for non-integers, plain digits otherwise.
pub fn format(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn format_slice(xs: &[Rational]) -> String {
    let parts: Vec<String> = xs.iter().map(format).collect();
    format!("({})", parts.join(", "))
}

/// Smallest positive value among `xs`, if any.
pub fn min_positive<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    xs.into_iter().filter(|x| x.is_positive()).min().cloned()
}

pub fn lcm_of_denominators<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Serde adapter: serializes as an integer when integral, else as `"p/q"`;
/// deserializes from JSON integers, decimals, or strings, exactly.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        if x.is_integer() {
            // arbitrary_precision keeps big integers exact.
            let n: serde_json::Number = x
                .numer()
                .to_string()
                .parse()
                .map_err(serde::ser::Error::custom)?;
            serde::Serialize::serialize(&n, s)
        } else {
            s.serialize_str(&format(x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }

    pub(crate) struct RationalVisitor;

    impl<'de> Visitor<'de> for RationalVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an integer, a decimal number, or a \"p/q\" string")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
            Ok(int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
            Ok(Rational::from_integer(BigInt::from(v)))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
            // Only reached without arbitrary_precision; go through the shortest
            // decimal representation so 0.1 stays 1/10.
            parse(&v.to_string()).map_err(E::custom)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
            parse(v).map_err(E::custom)
        }

        fn visit_map<A: de::MapAccess<'de>>(self, map: A) -> Result<Rational, A::Error> {
            // serde_json's arbitrary_precision numbers arrive as a one-entry map.
            let n: serde_json::Number =
                serde::Deserialize::deserialize(de::value::MapAccessDeserializer::new(map))?;
            parse(&n.to_string()).map_err(de::Error::custom)
        }
    }
}

/// Newtype wrapper so collections of rationals can derive serde.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl serde::Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_rational::serialize(&self.0, s)
    }
}

impl<'de> serde::Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        serde_rational::deserialize(d).map(Exact)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(&self.0))
    }
}

impl From<Rational> for Exact {
    fn from(x: Rational) -> Self {
        Exact(x)
    }
}
