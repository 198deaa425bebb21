use std::cmp::Ordering;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::analysis::{limit_at_end, sample_grid, Limit};
use super::expr::Expr;
use super::function::{AnalyticSymbol, Body, RealFunction, GUARD_BITS};
use super::{Interval, Value};
use crate::error::{Error, Result};
use crate::num::{QuadSurd, DEFAULT_PRECISION};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inverse {
    ClosedForm(Body),
    /// Bracketed root solve of `δ(y) = x`.
    Numeric,
}

/// A real analytic diffeomorphism `δ` of its domain onto its image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diffeomorphism {
    forward: RealFunction,
    inverse: Inverse,
    image: Interval,
    increasing: bool,
    certified: bool,
}

fn sinh_like() -> Expr {
    Expr::sub(Expr::exp(Expr::X), Expr::exp(Expr::neg(Expr::X)))
}

impl Diffeomorphism {
    /// `x ↦ s·x + t` on the real line.
    pub fn affine(s: Rational, t: Rational) -> Result<Self> {
        if s == 0 {
            return Err(Error::NotADiffeomorphism("zero slope".into()));
        }
        let inv = Poly::new(vec![Rational::from(-&t) / &s, Rational::from(1) / &s]);
        Ok(Diffeomorphism {
            increasing: s > 0,
            forward: RealFunction::polynomial(Poly::new(vec![t, s])),
            inverse: Inverse::ClosedForm(Body::Polynomial(inv)),
            image: Interval::real_line(),
            certified: true,
        })
    }

    pub fn identity() -> Self {
        Self::affine(Rational::from(1), Rational::new()).expect("nonzero slope")
    }

    /// Checks that `δ'` keeps one sign on the domain (exactly for polynomials,
    /// on a sample grid otherwise) and finds the image from end limits.
    pub fn new(forward: RealFunction) -> Result<Self> {
        let j = forward.domain.clone();
        let (increasing, certified) = match &forward.body {
            Body::Polynomial(p) => {
                if p.degree().unwrap_or(0) == 0 {
                    return Err(Error::NotADiffeomorphism("constant map".into()));
                }
                let d = p.derivative();
                if let Some(r) = d.real_roots(j.lower(), j.upper()).first() {
                    return Err(Error::NotADiffeomorphism(format!("derivative vanishes at {r}")));
                }
                (d.sign_at(&j.sample_point()) == Ordering::Greater, true)
            }
            Body::Elementary(_) => {
                let prec = DEFAULT_PRECISION;
                let mut sign = None;
                for x in sample_grid(&j, 1024) {
                    let (_, d) = forward.body.eval_with_derivative(&Float::with_val(prec, &x));
                    let s = d.cmp0();
                    if s.is_none() || s == Some(Ordering::Equal) || (sign.is_some() && sign != s) {
                        return Err(Error::NotADiffeomorphism(format!(
                            "derivative changes sign near {}",
                            crate::num::fmt_rational(&x)
                        )));
                    }
                    sign = s;
                }
                (sign == Some(Ordering::Greater), false)
            }
        };
        let image = image_of(&forward, increasing)?;
        let inverse = match &forward.body {
            Body::Polynomial(p) if p.degree() == Some(1) => {
                let (t, s) = (p.coeff(0), p.coeff(1));
                Inverse::ClosedForm(Body::Polynomial(Poly::new(vec![
                    Rational::from(-&t) / &s,
                    Rational::from(1) / &s,
                ])))
            }
            Body::Elementary(e) if *e == sinh_like() => Inverse::ClosedForm(Body::Elementary(Expr::asinh(
                Expr::mul(Expr::Const(Rational::from((1, 2))), Expr::X),
            ))),
            _ => Inverse::Numeric,
        };
        Ok(Diffeomorphism {
            forward,
            inverse,
            image,
            increasing,
            certified,
        })
    }

    pub fn parse(text: &str, domain: Interval) -> Result<Self> {
        Self::new(RealFunction::parse(text, domain)?)
    }

    pub fn forward(&self) -> &RealFunction {
        &self.forward
    }

    pub fn domain(&self) -> &Interval {
        &self.forward.domain
    }

    pub fn image(&self) -> &Interval {
        &self.image
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn inverse_kind(&self) -> &Inverse {
        &self.inverse
    }

    /// `(s, t)` when `δ(x) = s·x + t`.
    pub fn as_affine(&self) -> Option<(Rational, Rational)> {
        match &self.forward.body {
            Body::Polynomial(p) if p.degree() == Some(1) => Some((p.coeff(1), p.coeff(0))),
            _ => None,
        }
    }

    pub fn inverse_body(&self) -> Body {
        match &self.inverse {
            Inverse::ClosedForm(b) => b.clone(),
            Inverse::Numeric => Body::Elementary(Expr::InverseOf {
                forward: Box::new(self.forward.body.to_expr()),
                arg: Box::new(Expr::X),
            }),
        }
    }

    /// `δ⁻¹` as a diffeomorphism of the image back onto the domain.
    pub fn inverse(&self) -> Diffeomorphism {
        Diffeomorphism {
            forward: RealFunction::new(self.inverse_body(), self.image.clone()),
            inverse: Inverse::ClosedForm(self.forward.body.clone()),
            image: self.forward.domain.clone(),
            increasing: self.increasing,
            certified: self.certified,
        }
    }

    pub fn eval(&self, x: &Value, prec: u32) -> Result<Value> {
        self.forward.eval(x, prec)
    }

    pub fn eval_inverse(&self, x: &Value, prec: u32) -> Result<Value> {
        if !x.in_interval(&self.image) {
            return Err(Error::Domain(format!("{x} is outside the image {}", self.image)));
        }
        Ok(self.inverse_body().eval_value(x, prec))
    }

    /// `|δ⁻¹(δ(x)) − x|` computed at `prec` bits.
    pub fn round_trip_error(&self, x: &Value, prec: u32) -> Result<Float> {
        let y = self.eval(x, prec + GUARD_BITS)?;
        let back = self.eval_inverse(&y, prec + GUARD_BITS)?;
        match (&back, x) {
            (Value::Exact(a), Value::Exact(b)) => Ok(Float::with_val(prec, Rational::from(a - b).abs())),
            _ => Ok(Float::with_val(prec, back.to_float(prec + GUARD_BITS) - x.to_float(prec + GUARD_BITS)).abs()),
        }
    }
}

fn end_to_bound(l: Limit, which: &str) -> Result<Option<Rational>> {
    match l {
        Limit::PlusInf | Limit::MinusInf => Ok(None),
        Limit::Finite(f) => {
            let r = f.to_rational().ok_or_else(|| Error::Domain(format!("{which} end of the image is not finite")))?;
            Ok(Some(r))
        }
        Limit::Unknown => Err(Error::Domain(format!("cannot determine the {which} end of the image"))),
    }
}

fn image_of(f: &RealFunction, increasing: bool) -> Result<Interval> {
    let j = &f.domain;
    let (lo, hi) = match &f.body {
        Body::Polynomial(p) => {
            let at = |end: Option<&Rational>| end.map(|a| p.eval(a));
            (at(j.lower()), at(j.upper()))
        }
        Body::Elementary(e) => {
            let prec = DEFAULT_PRECISION;
            let a = end_to_bound(limit_at_end(e, j, false, prec), "lower")?;
            let b = end_to_bound(limit_at_end(e, j, true, prec), "upper")?;
            (a, b)
        }
    };
    if increasing {
        Interval::new(lo, hi)
    } else {
        Interval::new(hi, lo)
    }
}

/// `ψ = δ⁻¹ ∘ φ ∘ δ` on `δ⁻¹(J)`.
pub fn conjugate(phi: &AnalyticSymbol, delta: &Diffeomorphism) -> Result<AnalyticSymbol> {
    if let Some((s, t)) = delta.as_affine() {
        let dom = phi
            .domain()
            .affine_image(&(Rational::from(1) / &s), &(Rational::from(-&t) / &s));
        let body = match phi.body() {
            Body::Polynomial(p) => {
                let inner = Poly::new(vec![t.clone(), s.clone()]);
                let outer = p.compose(&inner).sub(&Poly::constant(t)).scale(&(Rational::from(1) / &s));
                Body::Polynomial(outer)
            }
            b => delta.inverse_body().compose(&b.compose(&delta.forward().body)),
        };
        return AnalyticSymbol::new(body, dom);
    }
    if delta.image() != phi.domain() {
        return Err(Error::Domain(format!(
            "δ maps onto {} but the symbol lives on {}",
            delta.image(),
            phi.domain()
        )));
    }
    let body = delta.inverse_body().compose(&phi.body().compose(&delta.forward().body));
    AnalyticSymbol::new(body, delta.domain().clone())
}

/// Result of conjugating `ax² + bx + c` to `−x² + μx`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuadraticNormalForm {
    NoFixedPoints,
    Normal {
        mu: QuadSurd,
        u: QuadSurd,
        v: QuadSurd,
        /// `δ(x) = −x/a + u`; present when `u` is rational.
        delta: Option<Diffeomorphism>,
    },
}

pub fn normalize_quadratic(a: &Rational, b: &Rational, c: &Rational) -> Result<QuadraticNormalForm> {
    if *a == 0 {
        return Err(Error::InvalidParameter("the quadratic coefficient must be nonzero".into()));
    }
    let bm1 = Rational::from(b - 1u32);
    let disc = Rational::from(&bm1 * &bm1) - Rational::from(a * c) * 4u32;
    let Some(root) = QuadSurd::sqrt_of(&disc) else {
        return Ok(QuadraticNormalForm::NoFixedPoints);
    };
    let inv2a = Rational::from(1) / Rational::from(a * 2u32);
    let one_minus_b = Rational::from(1) - b;
    let u = root.add_rational(&one_minus_b).scale(&inv2a);
    let v = root.neg().add_rational(&one_minus_b).scale(&inv2a);
    let mu = root.add_rational(&Rational::from(1));
    let delta = match u.as_rational() {
        Some(ur) => Some(Diffeomorphism::affine(Rational::from(-1) / a, ur.clone())?),
        None => None,
    };
    Ok(QuadraticNormalForm::Normal { mu, u, v, delta })
}

/// `−x² + μx` on the real line.
pub fn quadratic_normal_symbol(mu: &Rational) -> AnalyticSymbol {
    AnalyticSymbol::polynomial(
        Poly::new(vec![Rational::new(), mu.clone(), Rational::from(-1)]),
        Interval::real_line(),
    )
    .expect("non-constant map of the real line")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::parse_symbol;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn affine_conjugation_to_normal_form() {
        // φ = x + a(x−u)(x−v), a = −1, u = 0, v = 1 → ψ = 2x − x²
        let phi = parse_symbol("x - x*(x-1)", Interval::real_line()).unwrap();
        let delta = Diffeomorphism::affine(q(1, 1), q(0, 1)).unwrap();
        let psi = conjugate(&phi, &delta).unwrap();
        assert_eq!(psi.as_poly().unwrap(), &Poly::from_ints(&[0, 2, -1]));
    }

    #[test]
    fn normal_form_of_squares() {
        let nf = normalize_quadratic(&q(1, 1), &q(0, 1), &q(0, 1)).unwrap();
        let QuadraticNormalForm::Normal { mu, u, delta, .. } = nf else { panic!() };
        assert_eq!(mu.as_rational(), Some(&q(2, 1)));
        assert_eq!(u.as_rational(), Some(&q(1, 1)));
        let phi = parse_symbol("x^2", Interval::real_line()).unwrap();
        let psi = conjugate(&phi, &delta.unwrap()).unwrap();
        assert_eq!(psi.as_poly().unwrap(), &Poly::from_ints(&[0, 2, -1]));
        assert_eq!(
            normalize_quadratic(&q(1, 1), &q(1, 1), &q(1, 1)).unwrap(),
            QuadraticNormalForm::NoFixedPoints
        );
        let QuadraticNormalForm::Normal { mu, .. } = normalize_quadratic(&q(-1, 1), &q(1, 1), &q(0, 1)).unwrap() else {
            panic!()
        };
        assert_eq!(mu.as_rational(), Some(&q(1, 1)));
    }

    #[test]
    fn sinh_conjugate_of_square() {
        let phi = parse_symbol("x^2", Interval::real_line()).unwrap();
        let delta = Diffeomorphism::parse("exp(x) - exp(-x)", Interval::real_line()).unwrap();
        assert!(matches!(delta.inverse_kind(), Inverse::ClosedForm(_)));
        assert!(delta.image().is_real_line());
        let psi = conjugate(&phi, &delta).unwrap();
        assert_eq!(psi.eval(&Value::from_int(0), 128).unwrap(), Value::from_int(0));
        let x = Value::Exact(q(3, 4));
        let direct = psi.eval(&x, 200).unwrap().to_float(200);
        let dx = delta.eval(&x, 260).unwrap().to_float(260);
        let expect = delta.eval_inverse(&Value::Approx(Float::with_val(260, &dx * &dx)), 200).unwrap();
        let diff = Float::with_val(200, direct - expect.to_float(200)).abs();
        assert!(diff < Float::with_val(200, 1) >> 180);
        let err = delta.round_trip_error(&Value::Exact(q(-5, 2)), 256).unwrap();
        assert!(err < Float::with_val(256, 1) >> 240);
    }

    #[test]
    fn rejects_non_monotone() {
        assert!(matches!(
            Diffeomorphism::parse("x^2", Interval::real_line()),
            Err(Error::NotADiffeomorphism(_))
        ));
        assert!(Diffeomorphism::parse("x^3 + x", Interval::real_line()).is_ok());
    }
}
