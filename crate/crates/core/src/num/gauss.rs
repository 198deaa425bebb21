use rug::{Complex, Rational};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use super::{fmt_rational, parse_rational};
use crate::error::{Error, Result};

/// Complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRat { re, im: Rational::new() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(Rational::from(n))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        GaussRat::new(Rational::new(), Rational::from(1))
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_one(&self) -> bool {
        self.re == 1 && self.im == 0
    }

    pub fn is_real(&self) -> bool {
        self.im == 0
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), Rational::from(-&self.im))
    }

    /// `|z|^2`, exact.
    pub fn norm_sq(&self) -> Rational {
        Rational::from(self.re.square_ref()) + Rational::from(self.im.square_ref())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        let n = self.norm_sq();
        Ok(GaussRat::new(
            Rational::from(&self.re / &n),
            Rational::from(-&self.im) / &n,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussRat::new(Rational::from(&self.re * r), Rational::from(&self.im * r))
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = GaussRat::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    pub fn to_complex(&self, prec: u32) -> Complex {
        Complex::with_val(prec, (&self.re, &self.im))
    }
}

impl From<Rational> for GaussRat {
    fn from(r: Rational) -> Self {
        GaussRat::real(r)
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(Rational::from(&self.re + &o.re), Rational::from(&self.im + &o.im))
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(Rational::from(&self.re - &o.re), Rational::from(&self.im - &o.im))
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        let re = Rational::from(&self.re * &o.re) - Rational::from(&self.im * &o.im);
        let im = Rational::from(&self.re * &o.im) + Rational::from(&self.im * &o.re);
        GaussRat::new(re, im)
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(Rational::from(-&self.re), Rational::from(-&self.im))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0 {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let im_abs = Rational::from(self.im.abs_ref());
        let im_txt = if im_abs == 1 { String::new() } else { fmt_rational(&im_abs) };
        if self.re == 0 {
            let sign = if self.im < 0 { "-" } else { "" };
            write!(f, "{sign}{im_txt}i")
        } else {
            let sign = if self.im < 0 { '-' } else { '+' };
            write!(f, "{}{sign}{im_txt}i", fmt_rational(&self.re))
        }
    }
}

impl FromStr for GaussRat {
    type Err = Error;

    /// Accepts `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` with rational or decimal parts.
    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidParameter(format!("cannot parse complex value {text:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        let Some(body) = s.strip_suffix('i') else {
            return parse_rational(&s).map(GaussRat::real).ok_or_else(bad);
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-'));
        let (re_txt, im_txt) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_txt.is_empty() {
            Rational::new()
        } else {
            parse_rational(re_txt).ok_or_else(bad)?
        };
        let im = match im_txt {
            "" | "+" => Rational::from(1),
            "-" => Rational::from(-1),
            t => {
                let t = t.strip_suffix('*').unwrap_or(t);
                parse_rational(t).ok_or_else(bad)?
            }
        };
        Ok(GaussRat::new(re, im))
    }
}

impl Serialize for GaussRat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!(g("2"), GaussRat::from_int(2));
        assert_eq!(g("i"), GaussRat::i());
        assert_eq!(g("-i"), -&GaussRat::i());
        assert_eq!(g("1/2+3/4i"), GaussRat::new(Rational::from((1, 2)), Rational::from((3, 4))));
        assert_eq!(g("-1/2-i"), GaussRat::new(Rational::from((-1, 2)), Rational::from(-1)));
        assert_eq!(g("0.5i"), GaussRat::new(Rational::new(), Rational::from((1, 2))));
        assert_eq!(g("-1.5"), GaussRat::real(Rational::from((-3, 2))));
        assert!("1+".parse::<GaussRat>().is_err());
        assert!("x".parse::<GaussRat>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "3/2", "i", "-i", "2i", "1-i", "-1/2+3/4i", "7-5/3i"] {
            let z = g(s);
            assert_eq!(z.to_string(), s);
            assert_eq!(g(&z.to_string()), z);
        }
    }

    #[test]
    fn field_arithmetic() {
        let z = g("1+2i");
        let w = z.recip().unwrap();
        assert!((&z * &w).is_one());
        assert_eq!(g("i").pow(2).unwrap(), GaussRat::from_int(-1));
        assert_eq!(g("2").pow(-3).unwrap(), g("1/8"));
        assert_eq!(z.norm_sq(), Rational::from(5));
        assert!(GaussRat::zero().recip().is_err());
    }
}
