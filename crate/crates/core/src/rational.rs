//! `p/q` text encoding for rationals and the mixed number/rational value type
//! used in spec files.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Rational;

/// Parses `"p/q"`, `"p"` or a decimal like `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| format!("bad numerator in `{t}`"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| format!("bad denominator in `{t}`"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{t}`"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(p) = BigInt::from_str(t) {
        return Ok(Rational::from_integer(p));
    }
    parse_decimal(t).ok_or_else(|| format!("`{t}` is not a rational"))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.')?;
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer = BigInt::from_str(&digits).ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Canonical `p/q` form; integers are written with `/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// A probability, weight or transition entry: always an exact rational,
/// encoded as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prob(pub Rational);

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Prob;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Prob, E> {
                parse_rational(v).map(Prob).map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Prob, E> {
                Ok(Prob(Rational::from_integer(v.into())))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Prob, E> {
                Ok(Prob(Rational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Prob, E> {
                Err(E::custom(format!(
                    "probability {v} must be written as a \"p/q\" string"
                )))
            }
        }
        d.deserialize_any(V)
    }
}

/// A payoff or coefficient. JSON numbers are taken at their exact binary
/// value; `"p/q"` strings are exact. Both are stored as rationals so that any
/// finite-support process can be enumerated exactly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(pub Rational);

impl Value {
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.denom().is_one() {
            if let Some(i) = self.0.numer().to_i64() {
                return s.serialize_i64(i);
            }
        }
        // Dyadic values that round-trip through f64 are written as numbers.
        if let Some(f) = self.0.to_f64() {
            if rational_from_f64(f).as_ref() == Some(&self.0) && f.abs() < 1e15 && f.abs() > 1e-9 {
                return s.serialize_f64(f);
            }
        }
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Value;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a rational string \"p/q\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
                parse_rational(v).map(Value).map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
                Ok(Value(Rational::from_integer(v.into())))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value, E> {
                Ok(Value(Rational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Value, E> {
                rational_from_f64(v)
                    .map(Value)
                    .ok_or_else(|| E::custom(format!("{v} is not finite")))
            }
        }
        d.deserialize_any(V)
    }
}

/// `p / q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn parses_all_textual_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), r(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), r(7, 1));
        assert_eq!(parse_rational("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_rational("-.5").unwrap(), r(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn formats_with_explicit_denominator() {
        assert_eq!(format_rational(&r(1, 4)), "1/4");
        assert_eq!(format_rational(&r(0, 1)), "0/1");
        assert_eq!(format_rational(&r(-4, 2)), "-2/1");
    }

    #[test]
    fn value_json_forms() {
        let v: Value = serde_json::from_str("0.5").unwrap();
        assert_eq!(v.0, r(1, 2));
        let v: Value = serde_json::from_str("\"1/3\"").unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"1/3\"");
        let v: Value = serde_json::from_str("-2").unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), "-2");
        assert!(serde_json::from_str::<Prob>("0.5").is_err());
    }
}
