#![allow(dead_code)]

use compspec::num::GaussRat;
use compspec::poly::Poly;
use compspec::symbols::{parse_expr, parse_symbol, AnalyticSymbol, Body, Interval};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::Rational;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

pub fn g(s: &str) -> GaussRat {
    s.parse().unwrap()
}

pub fn sym(s: &str) -> AnalyticSymbol {
    parse_symbol(s, Interval::real_line()).unwrap()
}

pub fn body(s: &str) -> Body {
    Body::from_expr(parse_expr(s).unwrap())
}

/// Small rational with numerator in `[-n, n]` and denominator in `[1, d]`.
pub fn small_rational(rng: &mut ChaCha8Rng, n: i64, d: i64) -> Rational {
    Rational::from((rng.gen_range(-n..=n), rng.gen_range(1..=d)))
}

pub fn random_poly(rng: &mut ChaCha8Rng, degree: usize, n: i64, d: i64) -> Poly {
    Poly::new((0..=degree).map(|_| small_rational(rng, n, d)).collect())
}

/// Symbols used across the classification checks.
pub const CATALOG: [&str; 14] = [
    "exp(x/2)",
    "x+1",
    "x^2+x+1",
    "1/2*arctan(x)",
    "-x",
    "x",
    "(x^3+x)/2",
    "x^2",
    "x^3",
    "-x^2+x",
    "-x^2+1.5*x",
    "-x^2+2*x",
    "-x^2+4*x",
    "x/2",
];
