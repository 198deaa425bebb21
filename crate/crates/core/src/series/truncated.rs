use rug::{Complex, Float, Rational};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::{fmt_rational, parse_rational, GaussRat, Real, Scalar};

/// `Σ cₙ (x − center)ⁿ` truncated after `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    center: Real,
    coeffs: Vec<T>,
    precision: Option<u32>,
}

pub type ExactSeries = TruncatedSeries<GaussRat>;
pub type FloatSeries = TruncatedSeries<Complex>;

impl<T: Scalar> TruncatedSeries<T> {
    pub fn new(center: Real, coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        let precision = coeffs[0].precision();
        TruncatedSeries {
            center,
            coeffs,
            precision,
        }
    }

    pub fn center(&self) -> &Real {
        &self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    fn with_coeffs(&self, coeffs: Vec<T>) -> Self {
        TruncatedSeries {
            center: self.center.clone(),
            coeffs,
            precision: self.precision,
        }
    }

    pub fn zero_like(&self) -> Self {
        let z = self.coeffs[0].zero_like();
        self.with_coeffs(vec![z; self.coeffs.len()])
    }

    /// Same center and order, constant `c`.
    pub fn constant_like(&self, c: T) -> Self {
        let mut v = vec![c.zero_like(); self.coeffs.len()];
        v[0] = c;
        self.with_coeffs(v)
    }

    /// The series of `x − center`.
    pub fn variable_like(&self) -> Self {
        let mut v = vec![self.coeffs[0].zero_like(); self.coeffs.len()];
        if v.len() > 1 {
            v[1] = self.coeffs[0].one_like();
        }
        self.with_coeffs(v)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.with_coeffs(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.with_coeffs(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| a.mul(s)).collect())
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.coeffs.len().min(o.coeffs.len());
        let mut out = vec![self.coeffs[0].zero_like(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                out[i + j] = out[i + j].add(&self.coeffs[i].mul(&o.coeffs[j]));
            }
        }
        self.with_coeffs(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = self.constant_like(self.coeffs[0].one_like());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self ∘ inner`, where `inner` is a series about the same center whose
    /// constant term is that center (a fixed-point jet).
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.center != inner.center {
            return Err(Error::CenterMismatch(format!(
                "outer series at {}, inner series at {}",
                self.center, inner.center
            )));
        }
        let prec = self.precision.unwrap_or(64);
        let u = center_as_scalar::<T>(&self.center, prec)?;
        let shift = inner.sub(&inner.constant_like(u.clone()));
        if !shift.coeffs[0].is_zero() && T::EXACT {
            return Err(Error::CenterMismatch(format!(
                "inner constant term differs from center {}",
                self.center
            )));
        }
        if !T::EXACT && !close_to_zero(&shift.coeffs[0], prec) {
            return Err(Error::CenterMismatch(format!(
                "inner constant term differs from center {}",
                self.center
            )));
        }
        let mut t = shift;
        t.coeffs[0] = t.coeffs[0].zero_like();
        // Horner in t: c_N, then acc·t + c_k
        let mut acc = self.constant_like(self.coeffs[self.coeffs.len() - 1].clone());
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(&t);
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        Ok(acc)
    }

    /// Evaluates the polynomial part at displacement `h = x − center`.
    pub fn eval_offset(&self, h: &T) -> T {
        let mut acc = self.coeffs[self.coeffs.len() - 1].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(h).add(c);
        }
        acc
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.with_coeffs(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_float_series(&self, prec: u32) -> FloatSeries {
        TruncatedSeries {
            center: self.center.clone(),
            coeffs: self.coeffs.iter().map(|c| c.to_complex(prec)).collect(),
            precision: Some(prec),
        }
    }
}

impl ExactSeries {
    pub fn from_rationals(center: Real, coeffs: &[Rational]) -> Self {
        Self::new(center, coeffs.iter().map(|c| GaussRat::real(c.clone())).collect())
    }

    /// Real parts as rationals, when every coefficient is real.
    pub fn real_coeffs(&self) -> Option<Vec<Rational>> {
        self.coeffs
            .iter()
            .map(|c| c.is_real().then(|| c.re.clone()))
            .collect()
    }
}

impl FloatSeries {
    pub fn from_floats(center: Real, coeffs: &[Float]) -> Self {
        Self::new(center, coeffs.iter().map(|c| Complex::with_val(c.prec(), c)).collect())
    }
}

fn close_to_zero<T: Scalar>(c: &T, prec: u32) -> bool {
    let a = c.abs_float(prec);
    a.is_zero() || a < (Float::with_val(prec, 1) >> (prec.saturating_sub(24)))
}

pub(crate) fn center_as_scalar<T: Scalar>(center: &Real, prec: u32) -> Result<T> {
    match center.as_rational() {
        Some(r) => Ok(T::from_rational(r, prec)),
        None => {
            let f = center.to_float(prec);
            T::from_float(&f).ok_or_else(|| {
                Error::Domain(format!("exact series need a rational center, got {center}"))
            })
        }
    }
}

/// JSON form of one coefficient: a real string or a `[re, im]` pair.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoefRepr {
    Real(String),
    Pair([String; 2]),
}

pub trait SeriesCoef: Scalar {
    fn to_repr(&self) -> (String, Option<String>);
    fn from_repr(re: &str, im: Option<&str>, prec: u32) -> Option<Self>;
}

impl SeriesCoef for GaussRat {
    fn to_repr(&self) -> (String, Option<String>) {
        (fmt_rational(&self.re), (!self.is_real()).then(|| fmt_rational(&self.im)))
    }
    fn from_repr(re: &str, im: Option<&str>, _prec: u32) -> Option<Self> {
        let re = parse_rational(re)?;
        let im = match im {
            Some(t) => parse_rational(t)?,
            None => Rational::new(),
        };
        Some(GaussRat::new(re, im))
    }
}

impl SeriesCoef for Complex {
    fn to_repr(&self) -> (String, Option<String>) {
        let re = self.real().to_string_radix(10, None);
        let im = (!self.imag().is_zero()).then(|| self.imag().to_string_radix(10, None));
        (re, im)
    }
    fn from_repr(re: &str, im: Option<&str>, prec: u32) -> Option<Self> {
        let re = Float::with_val(prec, Float::parse(re).ok()?);
        let im = match im {
            Some(t) => Float::with_val(prec, Float::parse(t).ok()?),
            None => Float::new(prec),
        };
        Some(Complex::with_val(prec, (re, im)))
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    center: Real,
    order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision: Option<u32>,
    coeffs: Vec<CoefRepr>,
}

impl<T: SeriesCoef> Serialize for TruncatedSeries<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match c.to_repr() {
                (re, None) => CoefRepr::Real(re),
                (re, Some(im)) => CoefRepr::Pair([re, im]),
            })
            .collect();
        SeriesRepr {
            center: self.center.clone(),
            order: self.order(),
            precision: self.precision,
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de, T: SeriesCoef> Deserialize<'de> for TruncatedSeries<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(d)?;
        if repr.coeffs.len() != repr.order + 1 {
            return Err(D::Error::custom("coefficient count must be order + 1"));
        }
        let prec = repr.precision.unwrap_or(crate::num::DEFAULT_PRECISION);
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| {
                let parsed = match c {
                    CoefRepr::Real(re) => T::from_repr(re, None, prec),
                    CoefRepr::Pair([re, im]) => T::from_repr(re, Some(im), prec),
                };
                parsed.ok_or_else(|| D::Error::custom("bad series coefficient"))
            })
            .collect::<std::result::Result<Vec<T>, D::Error>>()?;
        Ok(TruncatedSeries {
            center: repr.center,
            coeffs,
            precision: repr.precision,
        })
    }
}

/// A series that is exact when possible and floating otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Series {
    Exact(ExactSeries),
    Float(FloatSeries),
}

impl Series {
    pub fn order(&self) -> usize {
        match self {
            Series::Exact(s) => s.order(),
            Series::Float(s) => s.order(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Series::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&ExactSeries> {
        match self {
            Series::Exact(s) => Some(s),
            Series::Float(_) => None,
        }
    }

    pub fn to_float_series(&self, prec: u32) -> FloatSeries {
        match self {
            Series::Exact(s) => s.to_float_series(prec),
            Series::Float(s) => s.to_float_series(prec),
        }
    }

    /// Coefficient `k` as a float (real part).
    pub fn coeff_float(&self, k: usize, prec: u32) -> Float {
        match self {
            Series::Exact(s) => Float::with_val(prec, &s.coeff(k).re),
            Series::Float(s) => Float::with_val(prec, s.coeff(k).real()),
        }
    }

    pub fn center(&self) -> &Real {
        match self {
            Series::Exact(s) => s.center(),
            Series::Float(s) => s.center(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(coeffs: &[i64]) -> ExactSeries {
        let v: Vec<Rational> = coeffs.iter().map(|&c| Rational::from(c)).collect();
        ExactSeries::from_rationals(Real::from_int(0), &v)
    }

    #[test]
    fn compose_geometric_with_x_minus_x2() {
        let f = ex(&[1, 1, 1, 1, 1]);
        let phi = ex(&[0, 1, -1, 0, 0]);
        let c = f.compose(&phi).unwrap();
        assert_eq!(c, ex(&[1, 1, 0, -1, -1]));
    }

    #[test]
    fn compose_checks_centers() {
        let f = ex(&[0, 1, 0]);
        let phi = ex(&[1, 1, 0]);
        assert!(matches!(f.compose(&phi), Err(Error::CenterMismatch(_))));
        let other = ExactSeries::from_rationals(Real::from_int(1), &[Rational::from(1), Rational::from(1)]);
        assert!(matches!(ex(&[0, 1]).compose(&other), Err(Error::CenterMismatch(_))));
    }

    #[test]
    fn product_and_power() {
        let s = ex(&[1, 1, 0, 0]);
        assert_eq!(s.pow(3), ex(&[1, 3, 3, 1]));
        assert_eq!(s.mul(&ex(&[1, -1, 1, -1])), ex(&[1, 0, 0, 0]));
    }

    #[test]
    fn json_round_trip_exact_and_complex_coefficients() {
        let s = ExactSeries::new(
            Real::from_int(0),
            vec![GaussRat::real(Rational::from((1, 3))), "1/2-2i".parse().unwrap()],
        );
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"1/3\""));
        assert!(text.contains("[\"1/2\",\"-2\"]"));
        let back: ExactSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);

        let f = s.to_float_series(128);
        let text = serde_json::to_string(&Series::Float(f.clone())).unwrap();
        let back: Series = serde_json::from_str(&text).unwrap();
        assert_eq!(back, Series::Float(f));
    }
}
