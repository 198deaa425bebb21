use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use super::fmt_rational;

/// `a + b·√d` with rational `a`, `b` and a positive non-square integer `d`
/// (or `b = 0`, `d = 1` for plain rationals).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadSurd {
    #[serde(with = "super::rational_string")]
    pub a: Rational,
    #[serde(with = "super::rational_string")]
    pub b: Rational,
    #[serde(with = "integer_string")]
    pub d: Integer,
}

mod integer_string {
    use rug::Integer;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let t = String::deserialize(d)?;
        Integer::from_str_radix(&t, 10).map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl QuadSurd {
    pub fn rational(a: Rational) -> Self {
        QuadSurd {
            a,
            b: Rational::new(),
            d: Integer::from(1),
        }
    }

    /// `√r` for a nonnegative rational, in canonical form.
    pub fn sqrt_of(r: &Rational) -> Option<Self> {
        if *r < 0 {
            return None;
        }
        if *r == 0 {
            return Some(Self::rational(Rational::new()));
        }
        // √(p/q) = √(p·q)/q
        let pq = Integer::from(r.numer() * r.denom());
        let (outside, inside) = split_square(&pq);
        let coeff = Rational::from((outside, r.denom().clone()));
        if inside == 1 {
            Some(Self::rational(coeff))
        } else {
            Some(QuadSurd {
                a: Rational::new(),
                b: coeff,
                d: inside,
            })
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    fn normalize(mut self) -> Self {
        if self.b == 0 {
            self.d = Integer::from(1);
        }
        self
    }

    fn common_d(&self, o: &Self) -> Integer {
        match (self.is_rational(), o.is_rational()) {
            (true, _) => o.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, o.d, "surds from different quadratic fields");
                self.d.clone()
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadSurd {
            a: Rational::from(&self.a + &o.a),
            b: Rational::from(&self.b + &o.b),
            d: self.common_d(o),
        }
        .normalize()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        QuadSurd {
            a: Rational::from(-&self.a),
            b: Rational::from(-&self.b),
            d: self.d.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.common_d(o);
        let a = Rational::from(&self.a * &o.a) + Rational::from(&self.b * &o.b) * &d;
        let b = Rational::from(&self.a * &o.b) + Rational::from(&self.b * &o.a);
        QuadSurd { a, b, d }.normalize()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadSurd {
            a: Rational::from(&self.a * r),
            b: Rational::from(&self.b * r),
            d: self.d.clone(),
        }
        .normalize()
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        QuadSurd {
            a: Rational::from(&self.a + r),
            b: self.b.clone(),
            d: self.d.clone(),
        }
    }

    /// `a² − b²d`.
    pub fn field_norm(&self) -> Rational {
        Rational::from(self.a.square_ref()) - Rational::from(self.b.square_ref()) * &self.d
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.field_norm();
        if n == 0 {
            return None;
        }
        Some(
            QuadSurd {
                a: Rational::from(&self.a / &n),
                b: Rational::from(-&self.b) / &n,
                d: self.d.clone(),
            }
            .normalize(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::rational(Rational::from(1));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact sign.
    pub fn sign(&self) -> Ordering {
        let sa = self.a.cmp0();
        let sb = self.b.cmp0();
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with b²d
        let a2 = Rational::from(self.a.square_ref());
        let b2d = Rational::from(self.b.square_ref()) * &self.d;
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn cmp_surd(&self, o: &Self) -> Ordering {
        self.sub(o).sign()
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.add_rational(&Rational::from(-r)).sign()
    }

    pub fn to_float(&self, prec: u32) -> Float {
        let root = Float::with_val(prec + 16, &self.d).sqrt();
        let v = root * &self.b + &self.a;
        Float::with_val(prec, v)
    }

    /// Rational enclosure `[lo, hi]` of width below `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        if self.is_rational() {
            return (self.a.clone(), self.a.clone());
        }
        // isqrt of d·4^k gives √d to k bits
        let k = bits + self.b.numer().significant_bits() + 4;
        let scaled = Integer::from(&self.d << (2 * k));
        let s = scaled.sqrt();
        let den = Integer::from(1) << k;
        let lo_root = Rational::from((s.clone(), den.clone()));
        let hi_root = Rational::from((s + 1u32, den));
        let x = Rational::from(&self.b * &lo_root) + &self.a;
        let y = Rational::from(&self.b * &hi_root) + &self.a;
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }
}

/// `n = outside² · inside` with `inside` free of the small square factors we can find.
fn split_square(n: &Integer) -> (Integer, Integer) {
    if n.is_perfect_square() {
        return (Integer::from(n.sqrt_ref()), Integer::from(1));
    }
    let mut inside = n.clone();
    let mut outside = Integer::from(1);
    let mut p: u32 = 2;
    while p < 10_000 {
        let sq = p * p;
        while inside.is_divisible_u(sq) {
            inside /= sq;
            outside *= p;
        }
        if inside.is_perfect_square() {
            outside *= Integer::from(inside.sqrt_ref());
            inside = Integer::from(1);
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (outside, inside)
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let b = fmt_rational(&self.b);
        if self.a == 0 {
            write!(f, "{b}*sqrt({})", self.d)
        } else if self.b > 0 {
            write!(f, "{}+{b}*sqrt({})", fmt_rational(&self.a), self.d)
        } else {
            write!(f, "{}{b}*sqrt({})", fmt_rational(&self.a), self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn sqrt_canonical_forms() {
        let s = QuadSurd::sqrt_of(&q(9, 4)).unwrap();
        assert_eq!(s.as_rational(), Some(&q(3, 2)));
        let s = QuadSurd::sqrt_of(&q(8, 1)).unwrap();
        assert_eq!((s.b.clone(), s.d.clone()), (q(2, 1), Integer::from(2)));
        let s = QuadSurd::sqrt_of(&q(1, 2)).unwrap();
        assert_eq!((s.b.clone(), s.d.clone()), (q(1, 2), Integer::from(2)));
        assert!(QuadSurd::sqrt_of(&q(-1, 1)).is_none());
    }

    #[test]
    fn arithmetic_and_sign() {
        let r5 = QuadSurd::sqrt_of(&q(5, 1)).unwrap();
        // (1+√5)/2 squared is (3+√5)/2
        let phi = r5.add_rational(&q(1, 1)).scale(&q(1, 2));
        let sq = phi.mul(&phi);
        assert_eq!(sq, r5.add_rational(&q(3, 1)).scale(&q(1, 2)));
        // 2 - √5 < 0, 3 - √5 > 0
        assert_eq!(r5.neg().add_rational(&q(2, 1)).sign(), Ordering::Less);
        assert_eq!(r5.neg().add_rational(&q(3, 1)).sign(), Ordering::Greater);
        let inv = phi.recip().unwrap();
        assert_eq!(inv.mul(&phi).as_rational(), Some(&q(1, 1)));
    }

    #[test]
    fn enclosure_brackets_value() {
        let r2 = QuadSurd::sqrt_of(&q(2, 1)).unwrap().scale(&q(-3, 1));
        let (lo, hi) = r2.enclosure(80);
        assert!(lo < hi);
        assert_eq!(r2.cmp_rational(&lo), Ordering::Greater);
        assert_eq!(r2.cmp_rational(&hi), Ordering::Less);
        assert!(Rational::from(&hi - &lo) < Rational::from((1, 1u64 << 60)));
    }
}
