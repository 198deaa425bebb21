use std::fmt;
use std::str::FromStr;

use rug::{Float, Rational};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Interval;
use crate::error::{Error, Result};
use crate::num::{fmt_rational, parse_rational};

/// A point or function value: exact rational, or a binary float carrying its precision.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx(Float),
}

impl Value {
    pub fn from_int(n: i64) -> Self {
        Value::Exact(Rational::from(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            Value::Exact(r) => Float::with_val(prec, r),
            Value::Approx(f) => Float::with_val(prec, f),
        }
    }

    pub fn in_interval(&self, j: &Interval) -> bool {
        match self {
            Value::Exact(r) => j.contains(r),
            Value::Approx(f) => j.contains_float(f),
        }
    }

    /// Rounds approximate values to `prec` bits; exact values are unchanged.
    pub fn rounded(self, prec: u32) -> Value {
        match self {
            Value::Approx(f) => Value::Approx(Float::with_val(prec, f)),
            v => v,
        }
    }

    pub fn decimal(&self, digits: usize) -> String {
        match self {
            Value::Exact(r) => fmt_rational(r),
            Value::Approx(f) => fmt_float(f, digits),
        }
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn fmt_float(f: &Float, digits: usize) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.to_string_radix(10, Some(digits.max(1)))
}

fn digits_for(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{}", fmt_rational(r)),
            Value::Approx(x) => write!(f, "{}", fmt_float(x, digits_for(x.prec()))),
        }
    }
}

impl FromStr for Value {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s.trim())
            .map(Value::Exact)
            .ok_or_else(|| Error::syntax(0, format!("not a rational number: {s:?}")))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Exact(r) => s.serialize_str(&fmt_rational(r)),
            Value::Approx(f) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("approx", &f.to_string_radix(10, None))?;
                m.serialize_entry("bits", &f.prec())?;
                m.end()
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Exact(String),
    Approx { approx: String, bits: u32 },
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Value, D::Error> {
        use serde::de::Error as _;
        match ValueRepr::deserialize(d)? {
            ValueRepr::Exact(s) => s.parse().map_err(D::Error::custom),
            ValueRepr::Approx { approx, bits } => Float::parse(&approx)
                .map(|p| Value::Approx(Float::with_val(bits, p)))
                .map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let v = Value::Exact(Rational::from((-7, 4)));
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"-7/4\"");
        let back: Value = serde_json::from_str("\"-7/4\"").unwrap();
        assert_eq!(back, v);
        let a = Value::Approx(Float::with_val(64, 1) / 3u32);
        let text = serde_json::to_string(&a).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        let diff = Float::with_val(64, back.to_float(64) - a.to_float(64)).abs();
        assert!(diff < Float::with_val(64, 1) >> 58);
    }
}
