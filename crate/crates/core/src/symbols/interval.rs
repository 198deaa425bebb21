use rug::{Float, Rational};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::num::{fmt_rational, parse_rational};

/// Open interval with exact rational or infinite ends. `None` means the
/// corresponding infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lower: Option<Rational>,
    upper: Option<Rational>,
}

impl Interval {
    pub fn new(lower: Option<Rational>, upper: Option<Rational>) -> Result<Self> {
        if let (Some(a), Some(b)) = (&lower, &upper) {
            if a >= b {
                return Err(Error::InvalidParameter(format!(
                    "empty interval ({}, {})",
                    fmt_rational(a),
                    fmt_rational(b)
                )));
            }
        }
        Ok(Interval { lower, upper })
    }

    pub fn finite(a: Rational, b: Rational) -> Result<Self> {
        Self::new(Some(a), Some(b))
    }

    pub fn real_line() -> Self {
        Interval {
            lower: None,
            upper: None,
        }
    }

    pub fn lower(&self) -> Option<&Rational> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&Rational> {
        self.upper.as_ref()
    }

    pub fn is_real_line(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_some() && self.upper.is_some()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|a| x > a) && self.upper.as_ref().is_none_or(|b| x < b)
    }

    pub fn contains_float(&self, x: &Float) -> bool {
        if !x.is_finite() {
            return false;
        }
        self.lower.as_ref().is_none_or(|a| *x > *a) && self.upper.as_ref().is_none_or(|b| *x < *b)
    }

    /// Whether `[a, b]` (the closure of `other`) lies inside this open interval.
    pub fn contains_closure_of(&self, other: &Interval) -> bool {
        let lo_ok = match (&self.lower, &other.lower) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(c)) => c > a,
        };
        let hi_ok = match (&self.upper, &other.upper) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(b), Some(d)) => d < b,
        };
        lo_ok && hi_ok
    }

    /// Whether `other ⊆ self` as open intervals.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        let lo_ok = match (&self.lower, &other.lower) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(c)) => c >= a,
        };
        let hi_ok = match (&self.upper, &other.upper) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(b), Some(d)) => d <= b,
        };
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lower = match (&self.lower, &other.lower) {
            (None, x) | (x, None) => x.clone(),
            (Some(a), Some(b)) => Some(a.max(b).clone()),
        };
        let upper = match (&self.upper, &other.upper) {
            (None, x) | (x, None) => x.clone(),
            (Some(a), Some(b)) => Some(a.min(b).clone()),
        };
        Interval::new(lower, upper).ok()
    }

    /// A rational point of the interval, preferring simple values.
    pub fn sample_point(&self) -> Rational {
        match (&self.lower, &self.upper) {
            (None, None) => Rational::new(),
            (Some(a), None) => Rational::from(a + 1u32).max(Rational::new()),
            (None, Some(b)) => Rational::from(b - 1u32).min(Rational::new()),
            (Some(a), Some(b)) => crate::num::simplest_between(
                &((Rational::from(a * 3u32) + b) / 4u32),
                &((Rational::from(b * 3u32) + a) / 4u32),
            ),
        }
    }

    /// Image of the interval under `x ↦ s·x + t` with `s ≠ 0`.
    pub fn affine_image(&self, s: &Rational, t: &Rational) -> Interval {
        let map = |x: &Rational| Rational::from(x * s) + t;
        let (lo, hi) = (self.lower.as_ref().map(map), self.upper.as_ref().map(map));
        if *s > 0 {
            Interval { lower: lo, upper: hi }
        } else {
            Interval { lower: hi, upper: lo }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lower.as_ref().map_or("-inf".to_string(), fmt_rational);
        let hi = self.upper.as_ref().map_or("inf".to_string(), fmt_rational);
        write!(f, "({lo},{hi})")
    }
}

impl FromStr for Interval {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::syntax(0, format!("interval must look like (lo,hi): {text:?}")))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| Error::syntax(1, "interval needs a comma"))?;
        let lower = match lo {
            "-inf" | "-infinity" => None,
            t => Some(parse_rational(t).ok_or_else(|| Error::syntax(1, format!("bad lower end {t:?}")))?),
        };
        let upper = match hi {
            "inf" | "+inf" | "infinity" => None,
            t => Some(
                parse_rational(t)
                    .ok_or_else(|| Error::syntax(lo.len() + 2, format!("bad upper end {t:?}")))?,
            ),
        };
        Interval::new(lower, upper)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(iv("(-inf, inf)"), Interval::real_line());
        assert_eq!(iv("(0,1/2)").to_string(), "(0,1/2)");
        assert_eq!(iv("(-1.5,inf)").to_string(), "(-3/2,inf)");
        assert!("(1,1)".parse::<Interval>().is_err());
        assert!("[0,1]".parse::<Interval>().is_err());
    }

    #[test]
    fn membership_is_open() {
        let j = iv("(0,1)");
        assert!(!j.contains(&Rational::new()));
        assert!(j.contains(&Rational::from((1, 2))));
        assert!(!j.contains(&Rational::from(1)));
    }

    #[test]
    fn set_relations() {
        assert!(iv("(-inf,inf)").contains_closure_of(&iv("(-1,1)")));
        assert!(!iv("(0,1)").contains_closure_of(&iv("(0,1/2)")));
        assert!(iv("(0,1)").contains_interval(&iv("(0,1/2)")));
        assert_eq!(iv("(-inf,1)").intersect(&iv("(0,inf)")), Some(iv("(0,1)")));
        assert_eq!(iv("(-inf,0)").intersect(&iv("(0,inf)")), None);
        for s in ["(-inf,inf)", "(0,1)", "(-inf,-5)", "(7,inf)", "(1/3,1/2)"] {
            assert!(iv(s).contains(&iv(s).sample_point()), "{s}");
        }
        let img = iv("(0,2)").affine_image(&Rational::from(-1), &Rational::from(1));
        assert_eq!(img, iv("(-1,1)"));
    }
}
