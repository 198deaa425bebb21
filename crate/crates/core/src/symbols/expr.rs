//! Expression trees for elementary symbols and the text grammar.

use rug::Rational;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::num::{fmt_rational, parse_rational};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    X,
    Const(#[serde(with = "crate::num::rational_string")] Rational),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
    Arctan(Box<Expr>),
    Sin(Box<Expr>),
    /// Inverse hyperbolic sine; produced only by conjugation.
    Asinh(Box<Expr>),
    /// The `y` with `forward(y) = arg`, for a strictly monotone `forward`.
    InverseOf { forward: Box<Expr>, arg: Box<Expr> },
}

impl Expr {
    pub fn constant(r: Rational) -> Expr {
        Expr::Const(r)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::from(n))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn pow(a: Expr, k: u32) -> Expr {
        Expr::Pow(Box::new(a), k)
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(Box::new(a))
    }

    pub fn arctan(a: Expr) -> Expr {
        Expr::Arctan(Box::new(a))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::Sin(Box::new(a))
    }

    pub fn asinh(a: Expr) -> Expr {
        Expr::Asinh(Box::new(a))
    }

    pub fn from_poly(p: &Poly) -> Expr {
        let mut acc: Option<Expr> = None;
        for (k, c) in p.coeffs().iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let term = match k {
                0 => Expr::Const(c.clone()),
                1 => Expr::mul(Expr::Const(c.clone()), Expr::X),
                _ => Expr::mul(Expr::Const(c.clone()), Expr::pow(Expr::X, k as u32)),
            };
            acc = Some(match acc {
                None => term,
                Some(a) => Expr::add(a, term),
            });
        }
        acc.unwrap_or(Expr::int(0))
    }

    /// Replaces `x` by `e`.
    pub fn substitute(&self, e: &Expr) -> Expr {
        let s = |a: &Expr| Box::new(a.substitute(e));
        match self {
            Expr::X => e.clone(),
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Add(a, b) => Expr::Add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
            Expr::Neg(a) => Expr::Neg(s(a)),
            Expr::Pow(a, k) => Expr::Pow(s(a), *k),
            Expr::Exp(a) => Expr::Exp(s(a)),
            Expr::Arctan(a) => Expr::Arctan(s(a)),
            Expr::Sin(a) => Expr::Sin(s(a)),
            Expr::Asinh(a) => Expr::Asinh(s(a)),
            Expr::InverseOf { forward, arg } => Expr::InverseOf {
                forward: forward.clone(),
                arg: s(arg),
            },
        }
    }

    /// The polynomial this tree denotes, if it uses only ring operations
    /// (transcendental nodes at a literal zero argument fold to constants).
    pub fn to_poly(&self) -> Option<Poly> {
        Some(match self {
            Expr::X => Poly::x(),
            Expr::Const(c) => Poly::constant(c.clone()),
            Expr::Add(a, b) => a.to_poly()?.add(&b.to_poly()?),
            Expr::Sub(a, b) => a.to_poly()?.sub(&b.to_poly()?),
            Expr::Mul(a, b) => a.to_poly()?.mul(&b.to_poly()?),
            Expr::Neg(a) => a.to_poly()?.neg(),
            Expr::Pow(a, k) => a.to_poly()?.pow(*k),
            Expr::Exp(a) => {
                let p = a.to_poly()?;
                if !p.is_zero() {
                    return None;
                }
                Poly::constant(Rational::from(1))
            }
            Expr::Arctan(a) | Expr::Sin(a) | Expr::Asinh(a) => {
                if !a.to_poly()?.is_zero() {
                    return None;
                }
                Poly::zero()
            }
            Expr::InverseOf { .. } => return None,
        })
    }

    pub fn is_transcendental(&self) -> bool {
        self.to_poly().is_none()
    }

    /// Symbolic derivative over ring operations and `exp`; `None` when the
    /// tree contains a node whose derivative needs a quotient or cosine.
    pub fn derivative(&self) -> Option<Expr> {
        Some(match self {
            Expr::X => Expr::int(1),
            Expr::Const(_) => Expr::int(0),
            Expr::Add(a, b) => Expr::add(a.derivative()?, b.derivative()?),
            Expr::Sub(a, b) => Expr::sub(a.derivative()?, b.derivative()?),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative()?, (**b).clone()),
                Expr::mul((**a).clone(), b.derivative()?),
            ),
            Expr::Neg(a) => Expr::neg(a.derivative()?),
            Expr::Pow(_, 0) => Expr::int(0),
            Expr::Pow(a, k) => Expr::mul(
                Expr::mul(Expr::int(*k as i64), Expr::pow((**a).clone(), k - 1)),
                a.derivative()?,
            ),
            Expr::Exp(a) => Expr::mul(self.clone(), a.derivative()?),
            Expr::Arctan(_) | Expr::Sin(_) | Expr::Asinh(_) | Expr::InverseOf { .. } => return None,
        })
    }
}

fn needs_parens(e: &Expr) -> bool {
    matches!(e, Expr::Add(..) | Expr::Sub(..) | Expr::Neg(..))
        || matches!(e, Expr::Const(c) if *c < 0 || *c.denom() != 1)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::X => write!(f, "x"),
            Expr::Const(c) => write!(f, "{}", fmt_rational(c)),
            Expr::Add(a, b) => write!(f, "{a} + {b}"),
            Expr::Sub(a, b) => {
                if matches!(**b, Expr::Add(..) | Expr::Sub(..)) {
                    write!(f, "{a} - ({b})")
                } else {
                    write!(f, "{a} - {b}")
                }
            }
            Expr::Mul(a, b) => {
                let wrap = |e: &Expr| {
                    if matches!(e, Expr::Add(..) | Expr::Sub(..) | Expr::Neg(..)) {
                        format!("({e})")
                    } else {
                        format!("{e}")
                    }
                };
                write!(f, "{}*{}", wrap(a), wrap(b))
            }
            Expr::Neg(a) => {
                if matches!(**a, Expr::Add(..) | Expr::Sub(..)) {
                    write!(f, "-({a})")
                } else {
                    write!(f, "-{a}")
                }
            }
            Expr::Pow(a, k) => {
                if needs_parens(a) || matches!(**a, Expr::Mul(..) | Expr::Pow(..)) {
                    write!(f, "({a})^{k}")
                } else {
                    write!(f, "{a}^{k}")
                }
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Arctan(a) => write!(f, "arctan({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Asinh(a) => write!(f, "asinh({a})"),
            Expr::InverseOf { forward, arg } => write!(f, "inverse[y -> {forward}]({arg})"),
        }
    }
}

/// Recursive-descent parser for
/// `expr := ["-"] term (("+"|"-") term)*`,
/// `term := unary (("*" unary) | ("/" rational))*`,
/// `unary := "-" unary | factor`, `factor := base ("^" integer)?`,
/// `base := rational | "x" | "(" expr ")" | fn "(" expr ")"`.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(Error::syntax(p.pos, format!("unexpected character {:?}", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::syntax(self.pos, format!("expected {:?}", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::add(acc, self.term()?);
            } else if self.eat(b'-') {
                acc = Expr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::mul(acc, self.unary()?);
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                self.skip_ws();
                let start = self.pos;
                let r = self.number()?;
                if r == 0 {
                    return Err(Error::syntax(start, "division by zero"));
                }
                if self.peek() == Some(b'/') {
                    return Err(Error::syntax(at, "chained division is ambiguous"));
                }
                acc = Expr::mul(acc, Expr::Const(r.recip()));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::neg(e),
            });
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(Error::syntax(start, "exponent must be a nonnegative integer"));
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let k: u32 = digits
                .parse()
                .map_err(|_| Error::syntax(start, "exponent too large"))?;
            if k > 4096 {
                return Err(Error::syntax(start, "exponent too large"));
            }
            return Ok(Expr::pow(base, k));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<Rational> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        parse_rational(text).ok_or_else(|| Error::syntax(start, format!("bad number {text:?}")))
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(Error::syntax(self.pos, "unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let n = self.number()?;
                // "p/q" is a single rational literal when q is an integer
                let save = self.pos;
                if self.eat(b'/') {
                    self.skip_ws();
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let followed_by_dot = self.src.get(self.pos) == Some(&b'.');
                    if start < self.pos && !followed_by_dot && *n.denom() == 1 {
                        let d: Rational = parse_rational(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
                            .ok_or_else(|| Error::syntax(start, "bad denominator"))?;
                        if d == 0 {
                            return Err(Error::syntax(start, "division by zero"));
                        }
                        return Ok(Expr::Const(n / d));
                    }
                    self.pos = save;
                }
                Ok(Expr::Const(n))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "x" => Ok(Expr::X),
                    "exp" | "arctan" | "sin" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(match name {
                            "exp" => Expr::exp(arg),
                            "arctan" => Expr::arctan(arg),
                            _ => Expr::sin(arg),
                        })
                    }
                    _ => Err(Error::syntax(start, format!("unknown name {name:?}"))),
                }
            }
            Some(c) => Err(Error::syntax(self.pos, format!("unexpected character {:?}", c as char))),
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
    fn polynomial_inputs_fold() {
        let e = parse_expr("-x^2 + 3/2*x").unwrap();
        assert_eq!(e.to_poly().unwrap().coeffs(), &[q(0, 1), q(3, 2), q(-1, 1)]);
        let e = parse_expr("(x^3+x)/2").unwrap();
        assert_eq!(e.to_poly().unwrap().coeffs(), &[q(0, 1), q(1, 2), q(0, 1), q(1, 2)]);
        let e = parse_expr("-x^2+1.5*x").unwrap();
        assert_eq!(e.to_poly().unwrap().coeffs(), &[q(0, 1), q(3, 2), q(-1, 1)]);
        let e = parse_expr("x*exp(0) + sin(0)").unwrap();
        assert_eq!(e.to_poly().unwrap(), Poly::x());
    }

    #[test]
    fn transcendental_inputs_stay_trees() {
        let e = parse_expr("1/2*arctan(x)").unwrap();
        assert!(e.to_poly().is_none());
        assert_eq!(e, Expr::mul(Expr::Const(q(1, 2)), Expr::arctan(Expr::X)));
        assert!(parse_expr("exp(x) - exp(-x)").unwrap().is_transcendental());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_expr("x + * 2") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        match parse_expr("cos(x)") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 0),
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("x^-1").is_err());
        assert!(parse_expr("(x").is_err());
        assert!(parse_expr("x/0").is_err());
        assert!(parse_expr("x/x").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn display_reparses_to_same_value() {
        for s in ["-x^2 + 3/2*x", "1/2*arctan(x)", "exp(1/2*x)", "(x - 1)^3 - x", "sin(x)*-2"] {
            let e = parse_expr(s).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            match (e.to_poly(), again.to_poly()) {
                (Some(a), Some(b)) => assert_eq!(a, b, "{s}"),
                _ => assert_eq!(e.to_string(), again.to_string(), "{s}"),
            }
        }
    }

    #[test]
    fn derivative_of_polynomial_tree() {
        let e = parse_expr("x^3 - 2*x").unwrap();
        assert_eq!(e.derivative().unwrap().to_poly().unwrap(), Poly::from_ints(&[-2, 0, 3]));
    }
}
