use std::cmp::Ordering;
use std::fmt;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::analysis::{limit_at_end, sample_grid, Limit};
use super::eval::{eval_exact, eval_float, jet_exact, jet_float};
use super::expr::{parse_expr, Expr};
use super::{Interval, Value};
use crate::error::{Error, Result};
use crate::num::{Real, DEFAULT_PRECISION};
use crate::poly::Poly;
use crate::series::{ExactSeries, FloatSeries, Series};

/// Guard bits added to every floating evaluation.
pub const GUARD_BITS: u32 = 64;

/// Sample count for numeric invariance checks of elementary bodies.
pub const INVARIANCE_SAMPLES: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    Polynomial(Poly),
    Elementary(Expr),
}

impl Body {
    /// Polynomial whenever the tree folds to one.
    pub fn from_expr(e: Expr) -> Body {
        match e.to_poly() {
            Some(p) => Body::Polynomial(p),
            None => Body::Elementary(e),
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            Body::Polynomial(p) => Some(p),
            Body::Elementary(_) => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Body::Polynomial(p) => Expr::from_poly(p),
            Body::Elementary(e) => e.clone(),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, Body::Polynomial(_))
    }

    pub fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        match self {
            Body::Polynomial(p) => Some(p.eval(x)),
            Body::Elementary(e) => eval_exact(e, x),
        }
    }

    /// Float value at the precision of `x`.
    pub fn eval_float(&self, x: &Float) -> Float {
        match self {
            Body::Polynomial(p) => p.eval_float(x),
            Body::Elementary(e) => eval_float(e, x),
        }
    }

    /// Exact when possible; otherwise computed with guard bits and rounded to `prec`.
    pub fn eval_value(&self, x: &Value, prec: u32) -> Value {
        if let Some(v) = x.as_rational().and_then(|r| self.eval_exact(r)) {
            return Value::Exact(v);
        }
        let xf = x.to_float(prec + GUARD_BITS);
        Value::Approx(Float::with_val(prec, self.eval_float(&xf)))
    }

    /// Value and first derivative in floating point at the precision of `x`.
    pub fn eval_with_derivative(&self, x: &Float) -> (Float, Float) {
        match self {
            Body::Polynomial(p) => (p.eval_float(x), p.derivative().eval_float(x)),
            Body::Elementary(e) => {
                let j = jet_float(e, x, 1);
                (j[0].clone(), j[1].clone())
            }
        }
    }

    pub fn derivative_value(&self, x: &Value, prec: u32) -> Value {
        match (self, x.as_rational()) {
            (Body::Polynomial(p), Some(r)) => Value::Exact(p.derivative().eval(r)),
            (Body::Elementary(e), Some(r)) => match jet_exact(e, r, 1) {
                Some(j) => Value::Exact(j[1].clone()),
                None => {
                    let xf = x.to_float(prec + GUARD_BITS);
                    Value::Approx(Float::with_val(prec, &jet_float(e, &xf, 1)[1]))
                }
            },
            _ => {
                let xf = x.to_float(prec + GUARD_BITS);
                Value::Approx(Float::with_val(prec, &self.eval_with_derivative(&xf).1))
            }
        }
    }

    /// Taylor coefficients at `center`; exact when the center and all node values are rational.
    pub fn jet(&self, center: &Real, order: usize, prec: u32) -> Series {
        if let Some(c) = center.as_rational() {
            let exact = match self {
                Body::Polynomial(p) => {
                    let s = p.shift(c);
                    Some((0..=order).map(|k| s.coeff(k)).collect::<Vec<_>>())
                }
                Body::Elementary(e) => jet_exact(e, c, order),
            };
            if let Some(v) = exact {
                return Series::Exact(ExactSeries::from_rationals(center.clone(), &v));
            }
        }
        let cf = center.to_float(prec + GUARD_BITS);
        let coeffs: Vec<Float> = match self {
            Body::Polynomial(p) => {
                let mut d = p.clone();
                let mut fact = Rational::from(1);
                (0..=order)
                    .map(|k| {
                        if k > 0 {
                            d = d.derivative();
                            fact *= k as u32;
                        }
                        let v = d.eval_float(&cf);
                        Float::with_val(prec, v / Float::with_val(prec + GUARD_BITS, &fact))
                    })
                    .collect()
            }
            Body::Elementary(e) => jet_float(e, &cf, order)
                .into_iter()
                .map(|c| Float::with_val(prec, c))
                .collect(),
        };
        Series::Float(FloatSeries::from_floats(center.clone(), &coeffs))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Body) -> Body {
        match (self, inner) {
            (Body::Polynomial(p), Body::Polynomial(q)) => Body::Polynomial(p.compose(q)),
            _ => Body::from_expr(self.to_expr().substitute(&inner.to_expr())),
        }
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::Polynomial(p) => write!(f, "{p}"),
            Body::Elementary(e) => write!(f, "{e}"),
        }
    }
}

/// A real analytic function on an interval without any self-map requirement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealFunction {
    pub body: Body,
    pub domain: Interval,
}

impl RealFunction {
    pub fn new(body: Body, domain: Interval) -> Self {
        RealFunction { body, domain }
    }

    pub fn parse(text: &str, domain: Interval) -> Result<Self> {
        Ok(RealFunction::new(Body::from_expr(parse_expr(text)?), domain))
    }

    pub fn polynomial(p: Poly) -> Self {
        RealFunction::new(Body::Polynomial(p), Interval::real_line())
    }

    pub fn eval(&self, x: &Value, prec: u32) -> Result<Value> {
        if !x.in_interval(&self.domain) {
            return Err(Error::Domain(format!("{x} is outside {}", self.domain)));
        }
        Ok(self.body.eval_value(x, prec))
    }

    pub fn eval_float(&self, x: &Float) -> Float {
        self.body.eval_float(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceCertificate {
    pub certified: bool,
    pub method: String,
}

/// A non-constant real analytic self-map `φ: J → J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSymbol {
    body: Body,
    domain: Interval,
    invariance: InvarianceCertificate,
}

pub fn parse_symbol(text: &str, domain: Interval) -> Result<AnalyticSymbol> {
    AnalyticSymbol::new(Body::from_expr(parse_expr(text)?), domain)
}

impl AnalyticSymbol {
    pub fn new(body: Body, domain: Interval) -> Result<Self> {
        let body = match body {
            Body::Elementary(e) => Body::from_expr(e),
            b => b,
        };
        check_nonconstant(&body, &domain)?;
        let invariance = check_invariance(&body, &domain)?;
        Ok(AnalyticSymbol {
            body,
            domain,
            invariance,
        })
    }

    pub fn polynomial(p: Poly, domain: Interval) -> Result<Self> {
        AnalyticSymbol::new(Body::Polynomial(p), domain)
    }

    pub fn parse(text: &str, domain: Interval) -> Result<Self> {
        parse_symbol(text, domain)
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn invariance(&self) -> &InvarianceCertificate {
        &self.invariance
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.body.as_poly()
    }

    pub fn expr(&self) -> Expr {
        self.body.to_expr()
    }

    pub fn as_function(&self) -> RealFunction {
        RealFunction::new(self.body.clone(), self.domain.clone())
    }

    /// The same map restricted to an invariant subinterval.
    pub fn restrict(&self, sub: &Interval) -> Result<AnalyticSymbol> {
        if !self.domain.contains_interval(sub) {
            return Err(Error::Domain(format!("{sub} is not inside {}", self.domain)));
        }
        AnalyticSymbol::new(self.body.clone(), sub.clone())
    }

    fn check_point(&self, x: &Value) -> Result<()> {
        if x.in_interval(&self.domain) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{x} is outside {}", self.domain)))
        }
    }

    pub fn eval(&self, x: &Value, prec: u32) -> Result<Value> {
        self.check_point(x)?;
        Ok(self.body.eval_value(x, prec))
    }

    pub fn deriv(&self, x: &Value, prec: u32) -> Result<Value> {
        self.check_point(x)?;
        Ok(self.body.derivative_value(x, prec))
    }

    pub fn jet(&self, center: &Real, order: usize, prec: u32) -> Result<Series> {
        let inside = match center.as_rational() {
            Some(r) => self.domain.contains(r),
            None => self.domain.contains_float(&center.to_float(prec)),
        };
        if !inside {
            return Err(Error::Domain(format!("{center} is outside {}", self.domain)));
        }
        Ok(self.body.jet(center, order, prec))
    }

    /// `φ^[n](x)`, checking each point of the orbit against `J`.
    pub fn iterate(&self, n: usize, x: &Value, prec: u32) -> Result<Value> {
        if !x.in_interval(&self.domain) {
            return Err(Error::OrbitEscape(0));
        }
        let mut cur = match x {
            Value::Approx(f) => Value::Approx(Float::with_val(prec + GUARD_BITS, f)),
            v => v.clone(),
        };
        for k in 1..=n {
            cur = match &cur {
                Value::Exact(r) => match self.body.eval_exact(r) {
                    Some(v) => Value::Exact(v),
                    None => Value::Approx(self.body.eval_float(&Float::with_val(prec + GUARD_BITS, r))),
                },
                Value::Approx(f) => Value::Approx(self.body.eval_float(f)),
            };
            if !cur.in_interval(&self.domain) {
                return Err(Error::OrbitEscape(k));
            }
        }
        Ok(cur.rounded(prec))
    }
}

impl fmt::Display for AnalyticSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.body, self.domain)
    }
}

/// Certificate for `body(J) ⊆ J`, or an invariance failure with a witness.
pub fn check_invariance(body: &Body, j: &Interval) -> Result<InvarianceCertificate> {
    check_maps_into(body, j, j)
}

/// Certificate for `body(from) ⊆ to`.
pub fn check_maps_into(body: &Body, from: &Interval, to: &Interval) -> Result<InvarianceCertificate> {
    match body {
        Body::Polynomial(p) => {
            polynomial_maps_into(p, from, to)?;
            Ok(InvarianceCertificate {
                certified: true,
                method: "exact root isolation".into(),
            })
        }
        Body::Elementary(e) => elementary_maps_into(e, from, to),
    }
}

fn check_nonconstant(body: &Body, j: &Interval) -> Result<()> {
    match body {
        Body::Polynomial(p) => {
            if p.is_constant() {
                return Err(Error::ConstantSymbol);
            }
        }
        Body::Elementary(e) => {
            let prec = DEFAULT_PRECISION;
            let grid = sample_grid(j, 16);
            let first = eval_float(e, &Float::with_val(prec, &grid[0]));
            let varies = grid[1..]
                .iter()
                .any(|x| eval_float(e, &Float::with_val(prec, x)) != first);
            if !varies {
                return Err(Error::ConstantSymbol);
            }
        }
    }
    Ok(())
}

/// `p(from) ⊆ to`: `p − a` has no root in `from` and the correct sign, for each finite end `a` of `to`.
fn polynomial_maps_into(p: &Poly, from: &Interval, to: &Interval) -> Result<()> {
    let sample = from.sample_point();
    for (end, want) in [(to.lower(), Ordering::Greater), (to.upper(), Ordering::Less)] {
        let Some(a) = end else { continue };
        let q = p.sub(&Poly::constant(a.clone()));
        if let Some(r) = q.real_roots(from.lower(), from.upper()).first() {
            return Err(Error::InvarianceFailure {
                message: format!("the map takes the value {} inside {from}", crate::num::fmt_rational(a)),
                witness: Some(r.to_string()),
            });
        }
        if q.sign_at(&sample) != want {
            return Err(Error::InvarianceFailure {
                message: format!("the map sends {from} outside {to}"),
                witness: Some(crate::num::fmt_rational(&sample)),
            });
        }
    }
    Ok(())
}

fn elementary_maps_into(e: &Expr, from: &Interval, to: &Interval) -> Result<InvarianceCertificate> {
    if to.is_real_line() {
        return Ok(InvarianceCertificate {
            certified: true,
            method: "target is the real line".into(),
        });
    }
    let prec = DEFAULT_PRECISION;
    for x in sample_grid(from, INVARIANCE_SAMPLES) {
        let v = eval_float(e, &Float::with_val(prec, &x));
        if !to.contains_float(&v) {
            return Err(Error::InvarianceFailure {
                message: format!("sampled value leaves {to}"),
                witness: Some(crate::num::fmt_rational(&x)),
            });
        }
    }
    for upper in [false, true] {
        let lim = limit_at_end(e, from, upper, prec);
        let outside = match &lim {
            Limit::Finite(v) => {
                let below = to.lower().is_some_and(|a| *v < *a);
                let above = to.upper().is_some_and(|b| *v > *b);
                below || above
            }
            Limit::PlusInf => to.upper().is_some(),
            Limit::MinusInf => to.lower().is_some(),
            Limit::Unknown => false,
        };
        if outside {
            return Err(Error::InvarianceFailure {
                message: format!("limit at the {} end leaves {to}", if upper { "upper" } else { "lower" }),
                witness: None,
            });
        }
    }
    Ok(InvarianceCertificate {
        certified: false,
        method: format!("{INVARIANCE_SAMPLES}-point sample and end limits"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn parse_folds_polynomials() {
        let s = parse_symbol("-x^2 + 3/2*x", Interval::real_line()).unwrap();
        assert_eq!(s.as_poly().unwrap().coeffs(), &[q(0, 1), q(3, 2), q(-1, 1)]);
        let s = parse_symbol("1/2*arctan(x)", Interval::real_line()).unwrap();
        assert!(!s.body().is_polynomial());
        assert_eq!(s.eval(&Value::from_int(0), 64).unwrap(), Value::from_int(0));
        assert!(matches!(parse_symbol("5", Interval::real_line()), Err(Error::ConstantSymbol)));
    }

    #[test]
    fn invariance_is_checked() {
        let j = Interval::finite(q(0, 1), q(1, 1)).unwrap();
        assert!(parse_symbol("-x^2+x", j.clone()).is_ok());
        assert!(matches!(
            parse_symbol("2*x", j.clone()),
            Err(Error::InvarianceFailure { .. })
        ));
        // touches the upper end at 1/2
        assert!(parse_symbol("4*x - 4*x^2", j).is_err());
    }

    #[test]
    fn iterate_and_escape() {
        let s = parse_symbol("x^2", Interval::real_line()).unwrap();
        assert_eq!(s.iterate(2, &Value::from_int(2), 64).unwrap(), Value::from_int(16));
        let s = parse_symbol("-x^2+3*x", Interval::real_line()).unwrap();
        assert_eq!(s.iterate(2, &Value::from_int(1), 64).unwrap(), Value::from_int(2));
        let j = Interval::finite(q(-1, 1), q(1, 1)).unwrap();
        let s = AnalyticSymbol::new(Body::Polynomial(Poly::x().scale(&q(1, 2))), j).unwrap();
        assert_eq!(s.iterate(3, &Value::from_int(8), 64), Err(Error::OrbitEscape(0)));
    }

    #[test]
    fn eval_float_accuracy() {
        let s = parse_symbol("1/2*arctan(x)", Interval::real_line()).unwrap();
        let v = s.eval(&Value::from_int(1), 64).unwrap().to_float(64);
        assert_eq!(v, super::super::pi(64) / 8u32);
    }
}
