//! Exact and arbitrary-precision number types shared by every module.

mod gauss;
mod real;
mod scalar;
mod surd;

pub use gauss::GaussRat;
pub use real::{AlgebraicValue, Real, Tri};
pub use scalar::Scalar;
pub use surd::QuadSurd;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use std::cmp::Ordering;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Parses `p`, `p/q` or a finite decimal such as `-1.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: Integer = parse_integer(num)?;
        let d: Integer = parse_integer(den)?;
        if d <= 0 {
            return None;
        }
        return Some(Rational::from((n, d)));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (neg, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if (int_digits.is_empty() && frac_part.is_empty())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return None;
        }
        let digits = format!("{int_digits}{frac_part}");
        let mag = if digits.is_empty() {
            Integer::new()
        } else {
            Integer::from_str_radix(&digits, 10).ok()?
        };
        let scale = Integer::from(Integer::u_pow_u(10, frac_part.len() as u32));
        let r = Rational::from((mag, scale));
        return Some(if neg { -r } else { r });
    }
    parse_integer(s).map(Rational::from)
}

fn parse_integer(s: &str) -> Option<Integer> {
    let t = s.trim();
    let body = t.strip_prefix(['-', '+']).unwrap_or(t);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    Integer::from_str_radix(t.strip_prefix('+').unwrap_or(t), 10).ok()
}

/// `p` for integers, `p/q` otherwise.
pub fn fmt_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_float(r: &Rational, prec: u32) -> Float {
    Float::with_val(prec, r)
}

/// Exact value of a finite float.
pub fn float_to_rational(f: &Float) -> Option<Rational> {
    f.to_rational()
}

/// The rational with smallest denominator in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if *lo <= 0 && *hi >= 0 {
        return Rational::new();
    }
    if *hi < 0 {
        let neg_hi = Rational::from(-hi);
        let neg_lo = Rational::from(-lo);
        return -simplest_between(&neg_hi, &neg_lo);
    }
    let fl = lo.clone().floor();
    if fl == *lo {
        return lo.clone();
    }
    let next = Rational::from(&fl + 1u32);
    if next <= *hi {
        return next;
    }
    let a = Rational::from(hi - &fl).recip();
    let b = Rational::from(lo - &fl).recip();
    fl + simplest_between(&a, &b).recip()
}

pub fn rpow(r: &Rational, n: u32) -> Rational {
    Rational::from(Pow::pow(r, n))
}

pub fn sign_of(r: &Rational) -> Ordering {
    r.cmp0()
}

/// Integer `n` such that `2^n` bounds `|r|` from above (for nonzero `r`).
pub fn log2_upper(r: &Rational) -> i64 {
    if *r == 0 {
        return i64::MIN / 4;
    }
    let n = r.numer().significant_bits() as i64;
    let d = r.denom().significant_bits() as i64;
    n - d + 1
}

/// Mixed-precision helper: the float `2^-bits`.
pub fn pow2_neg(bits: u32, prec: u32) -> Float {
    Float::with_val(prec, 1) >> bits
}

/// Accepts an exact rational given as a string ("p/q", integer or decimal).
pub mod rational_string {
    use rug::Rational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).ok_or_else(|| D::Error::custom(format!("bad rational {text:?}")))
    }
}

pub mod rational_vec {
    use rug::Rational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(super::fmt_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| super::parse_rational(t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}"))))
            .collect()
    }
}

pub mod rational_opt {
    use rug::Rational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&super::fmt_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| super::parse_rational(&t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}"))))
            .transpose()
    }
}
