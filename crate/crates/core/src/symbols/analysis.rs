//! Limits at the ends of an interval and sampling grids, used by the
//! heuristic certificates for elementary symbols.

use std::cmp::Ordering;

use rug::{Float, Rational};

use super::eval::{eval_float, pi, solve_inverse};
use super::expr::Expr;
use super::Interval;

#[derive(Clone, Debug, PartialEq)]
pub enum Limit {
    Finite(Float),
    PlusInf,
    MinusInf,
    Unknown,
}

impl Limit {
    fn from_sign(s: Ordering) -> Limit {
        match s {
            Ordering::Greater => Limit::PlusInf,
            Ordering::Less => Limit::MinusInf,
            Ordering::Equal => Limit::Unknown,
        }
    }

    fn neg(self) -> Limit {
        match self {
            Limit::Finite(f) => Limit::Finite(-f),
            Limit::PlusInf => Limit::MinusInf,
            Limit::MinusInf => Limit::PlusInf,
            Limit::Unknown => Limit::Unknown,
        }
    }

    fn sign(&self) -> Option<Ordering> {
        match self {
            Limit::Finite(f) => f.cmp0(),
            Limit::PlusInf => Some(Ordering::Greater),
            Limit::MinusInf => Some(Ordering::Less),
            Limit::Unknown => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Limit::PlusInf | Limit::MinusInf)
    }
}

fn add(a: Limit, b: Limit, prec: u32) -> Limit {
    use Limit::*;
    match (a, b) {
        (Finite(x), Finite(y)) => Finite(Float::with_val(prec, x + y)),
        (Unknown, _) | (_, Unknown) => Unknown,
        (PlusInf, MinusInf) | (MinusInf, PlusInf) => Unknown,
        (PlusInf, _) | (_, PlusInf) => PlusInf,
        (MinusInf, _) | (_, MinusInf) => MinusInf,
    }
}

fn mul(a: Limit, b: Limit, prec: u32) -> Limit {
    use Limit::*;
    match (a, b) {
        (Finite(x), Finite(y)) => Finite(Float::with_val(prec, x * y)),
        (Unknown, _) | (_, Unknown) => Unknown,
        (x, y) => match (x.sign(), y.sign()) {
            (Some(Ordering::Equal), _) | (_, Some(Ordering::Equal)) => Unknown,
            (Some(s), Some(t)) => Limit::from_sign(if s == t { Ordering::Greater } else { Ordering::Less }),
            _ => Unknown,
        },
    }
}

/// Limit of `e(x)` as `x → ±∞`.
pub fn limit_at_infinity(e: &Expr, plus: bool, prec: u32) -> Limit {
    if let Some(p) = e.to_poly() {
        return match p.degree() {
            None => Limit::Finite(Float::new(prec)),
            Some(0) => Limit::Finite(Float::with_val(prec, &p.coeffs()[0])),
            Some(_) => Limit::from_sign(p.sign_at_infinity(plus)),
        };
    }
    let rec = |a: &Expr| limit_at_infinity(a, plus, prec);
    match e {
        Expr::X => Limit::from_sign(if plus { Ordering::Greater } else { Ordering::Less }),
        Expr::Const(c) => Limit::Finite(Float::with_val(prec, c)),
        Expr::Add(a, b) => add(rec(a), rec(b), prec),
        Expr::Sub(a, b) => add(rec(a), rec(b).neg(), prec),
        Expr::Mul(a, b) => mul(rec(a), rec(b), prec),
        Expr::Neg(a) => rec(a).neg(),
        Expr::Pow(a, k) => {
            let mut acc = Limit::Finite(Float::with_val(prec, 1));
            let base = rec(a);
            for _ in 0..*k {
                acc = mul(acc, base.clone(), prec);
            }
            acc
        }
        Expr::Exp(a) => match rec(a) {
            Limit::Finite(f) => Limit::Finite(f.exp()),
            Limit::PlusInf => Limit::PlusInf,
            Limit::MinusInf => Limit::Finite(Float::new(prec)),
            Limit::Unknown => Limit::Unknown,
        },
        Expr::Arctan(a) => match rec(a) {
            Limit::Finite(f) => Limit::Finite(f.atan()),
            Limit::PlusInf => Limit::Finite(pi(prec) / 2u32),
            Limit::MinusInf => Limit::Finite(-pi(prec) / 2u32),
            Limit::Unknown => Limit::Unknown,
        },
        Expr::Sin(a) => match rec(a) {
            Limit::Finite(f) => Limit::Finite(f.sin()),
            _ => Limit::Unknown,
        },
        Expr::Asinh(a) => match rec(a) {
            Limit::Finite(f) => Limit::Finite(f.asinh()),
            l => l,
        },
        Expr::InverseOf { forward, arg } => {
            let up = limit_at_infinity(forward, true, prec);
            let down = limit_at_infinity(forward, false, prec);
            match rec(arg) {
                Limit::Finite(t) => solve_inverse(forward, &t, prec).map_or(Limit::Unknown, Limit::Finite),
                Limit::Unknown => Limit::Unknown,
                inf => {
                    if up == inf {
                        Limit::PlusInf
                    } else if down == inf {
                        Limit::MinusInf
                    } else {
                        Limit::Unknown
                    }
                }
            }
        }
    }
}

/// Limit at an end of `j`: the value at a finite end, or the limit at infinity.
pub fn limit_at_end(e: &Expr, j: &Interval, upper: bool, prec: u32) -> Limit {
    let end = if upper { j.upper() } else { j.lower() };
    match end {
        Some(a) => {
            let v = eval_float(e, &Float::with_val(prec, a));
            if v.is_finite() {
                Limit::Finite(v)
            } else {
                Limit::Unknown
            }
        }
        None => limit_at_infinity(e, upper, prec),
    }
}

/// `n` interior rational points of `j`, spread over large magnitudes on unbounded sides.
pub fn sample_grid(j: &Interval, n: usize) -> Vec<Rational> {
    let k = Rational::from(16);
    (0..n)
        .map(|i| {
            let t = Rational::from((2 * i as i64 + 1, 2 * n as i64));
            match (j.lower(), j.upper()) {
                (Some(a), Some(b)) => Rational::from(b - a) * t + a,
                (Some(a), None) => Rational::from(&k * &t) / (Rational::from(1) - &t) + a,
                (None, Some(b)) => {
                    let s = Rational::from(1) - &t;
                    Rational::from(b - Rational::from(&k * &s) / t)
                }
                (None, None) => {
                    let s = Rational::from(&t * 2u32) - 1u32;
                    let den = Rational::from(1) - Rational::from(&s * &s);
                    Rational::from(&k * &s) / den
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::parse_expr;

    #[test]
    fn limits_follow_growth_rules() {
        let e = parse_expr("exp(x) - exp(-x)").unwrap();
        assert_eq!(limit_at_infinity(&e, true, 64), Limit::PlusInf);
        assert_eq!(limit_at_infinity(&e, false, 64), Limit::MinusInf);
        let e = parse_expr("exp(1/2*x)").unwrap();
        assert_eq!(limit_at_infinity(&e, false, 64), Limit::Finite(Float::new(64)));
        let e = parse_expr("1/2*arctan(x)").unwrap();
        assert_eq!(limit_at_infinity(&e, true, 64), Limit::Finite(pi(64) / 4u32));
        let e = parse_expr("x^2 - x").unwrap();
        assert_eq!(limit_at_infinity(&e, false, 64), Limit::PlusInf);
        assert_eq!(limit_at_infinity(&parse_expr("sin(x)").unwrap(), true, 64), Limit::Unknown);
    }

    #[test]
    fn grid_stays_inside() {
        for j in ["(-inf,inf)", "(0,1)", "(2,inf)", "(-inf,-3)"] {
            let j: Interval = j.parse().unwrap();
            let g = sample_grid(&j, 64);
            assert!(g.iter().all(|x| j.contains(x)));
            assert!(g.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
