use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use super::{fmt_rational, GaussRat, QuadSurd};
use crate::poly::{AlgebraicRoot, Poly, RealRoot};

/// Three-valued answer for predicates that may be undecidable numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Tri::Yes
    }
}

/// `map(α)` for an algebraic root α.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicValue {
    pub root: AlgebraicRoot,
    pub map: Poly,
}

/// A real number in the most exact representation available.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Real {
    Rational(#[serde(with = "super::rational_string")] Rational),
    Surd(QuadSurd),
    Algebraic(AlgebraicValue),
    /// Heuristic enclosure from floating-point work.
    Approx {
        #[serde(with = "super::rational_string")]
        lo: Rational,
        #[serde(with = "super::rational_string")]
        hi: Rational,
    },
}

impl Real {
    pub fn from_int(n: i64) -> Self {
        Real::Rational(Rational::from(n))
    }

    /// Heuristic value from a float, widened by `2^-(prec-8)` relative.
    pub fn approx(f: &Float) -> Self {
        let v = f.to_rational().unwrap_or_default();
        let ulp = Float::with_val(f.prec(), 1) >> (f.prec().saturating_sub(8));
        let scale = Float::with_val(f.prec(), f.abs_ref()).max(&Float::with_val(f.prec(), 1));
        let rad = (ulp * scale).to_rational().unwrap_or_default();
        Real::Approx {
            lo: Rational::from(&v - &rad),
            hi: v + rad,
        }
    }

    /// Canonical real for `q(root)`: rational when possible, otherwise a root
    /// of the minimal polynomial of the value within the algebra of `root`.
    pub fn of_root(root: &RealRoot, q: &Poly) -> Self {
        match root {
            RealRoot::Rational(r) => Real::Rational(q.eval(r)),
            RealRoot::Algebraic(a) => canonical_algebraic(a, q),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Real::Approx { .. })
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Real::Rational(r) => Some(r),
            Real::Surd(s) => s.as_rational(),
            _ => None,
        }
    }

    /// Exact comparison with a rational, or `None` when an enclosure straddles it.
    pub fn cmp_rational(&self, r: &Rational) -> Option<Ordering> {
        match self {
            Real::Rational(x) => Some(x.cmp(r)),
            Real::Surd(s) => Some(s.cmp_rational(r)),
            Real::Algebraic(v) => Some(v.root.sign_of(&v.map.sub(&Poly::constant(r.clone())))),
            Real::Approx { lo, hi } => {
                if hi < r {
                    Some(Ordering::Less)
                } else if lo > r {
                    Some(Ordering::Greater)
                } else {
                    None
                }
            }
        }
    }

    pub fn sign(&self) -> Option<Ordering> {
        self.cmp_rational(&Rational::new())
    }

    /// Compares `|self|` with 1.
    pub fn abs_cmp_one(&self) -> Option<Ordering> {
        let above = self.cmp_rational(&Rational::from(1))?;
        let below = self.cmp_rational(&Rational::from(-1))?;
        Some(match (below, above) {
            (Ordering::Less, _) | (_, Ordering::Greater) => Ordering::Greater,
            (Ordering::Equal, _) | (_, Ordering::Equal) => Ordering::Equal,
            _ => Ordering::Less,
        })
    }

    /// `s·self + t`.
    pub fn affine(&self, s: &Rational, t: &Rational) -> Real {
        match self {
            Real::Rational(x) => Real::Rational(Rational::from(x * s) + t),
            Real::Surd(q) => Real::Surd(q.scale(s).add_rational(t)),
            Real::Algebraic(v) => {
                let map = v.map.scale(s).add(&Poly::constant(t.clone()));
                canonical_algebraic(&v.root, &map)
            }
            Real::Approx { lo, hi } => {
                let a = Rational::from(lo * s) + t;
                let b = Rational::from(hi * s) + t;
                if a <= b {
                    Real::Approx { lo: a, hi: b }
                } else {
                    Real::Approx { lo: b, hi: a }
                }
            }
        }
    }

    /// Rational enclosure; exact values give a width below `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        match self {
            Real::Rational(r) => (r.clone(), r.clone()),
            Real::Surd(s) => s.enclosure(bits),
            Real::Algebraic(v) => v.enclosure(bits),
            Real::Approx { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            Real::Rational(r) => Float::with_val(prec, r),
            Real::Surd(s) => s.to_float(prec),
            _ => {
                let (lo, hi) = self.enclosure(prec + 8);
                Float::with_val(prec, &(lo + hi)) / 2u32
            }
        }
    }

    /// Decides `self^n = λ`.
    pub fn pow_equals(&self, n: u32, lambda: &GaussRat) -> Tri {
        if !lambda.is_real() {
            return Tri::No;
        }
        let target = &lambda.re;
        match self {
            Real::Rational(r) => Tri::from_bool(super::rpow(r, n) == *target),
            Real::Surd(s) => Tri::from_bool(s.pow(n).cmp_rational(target) == Ordering::Equal),
            Real::Algebraic(v) => {
                let reduced = v.map.pow(n).rem(&v.root.poly);
                Tri::from_bool(v.root.sign_of(&reduced.sub(&Poly::constant(target.clone()))) == Ordering::Equal)
            }
            Real::Approx { lo, hi } => {
                let (a, b) = interval_pow(lo, hi, n);
                if target < &a || target > &b {
                    Tri::No
                } else if Rational::from(&b - &a) < Rational::from((1, 1u128 << 100)) {
                    Tri::Yes
                } else {
                    Tri::Unknown
                }
            }
        }
    }

    /// Smallest `n ≥ 0` with `self^n = λ`, searching while `|self|^n` can still reach `|λ|`.
    pub fn log_of(&self, lambda: &GaussRat) -> Tri {
        if !lambda.is_real() || lambda.is_zero() {
            return Tri::No;
        }
        match self.abs_cmp_one() {
            None => Tri::Unknown,
            Some(Ordering::Equal) => {
                // |m| = 1: m^n is ±1
                let one = Rational::from(1);
                if lambda.re == one {
                    return Tri::Yes;
                }
                if lambda.re == -one {
                    return Tri::from_bool(self.sign() == Some(Ordering::Less));
                }
                Tri::No
            }
            Some(ord) => {
                let abs_l = Rational::from(lambda.re.abs_ref());
                let (m_lo, m_hi) = self.enclosure(64);
                let m_abs_lo = if m_lo.cmp0() == m_hi.cmp0() {
                    Rational::from(m_lo.abs_ref()).min(Rational::from(m_hi.abs_ref()))
                } else {
                    Rational::new()
                };
                let m_abs_hi = Rational::from(m_lo.abs_ref()).max(Rational::from(m_hi.abs_ref()));
                let mut unknown = false;
                for n in 0..4096u32 {
                    let lo_n = super::rpow(&m_abs_lo, n);
                    let hi_n = super::rpow(&m_abs_hi, n);
                    let past = match ord {
                        Ordering::Greater => lo_n > abs_l,
                        _ => hi_n < abs_l && m_abs_hi < 1,
                    };
                    if past {
                        break;
                    }
                    match self.pow_equals(n, lambda) {
                        Tri::Yes => return Tri::Yes,
                        Tri::Unknown => unknown = true,
                        Tri::No => {}
                    }
                }
                if unknown {
                    Tri::Unknown
                } else {
                    Tri::No
                }
            }
        }
    }
}

impl AlgebraicValue {
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        let target = Rational::from((Integer::from(1), Integer::from(1) << bits));
        let mut k = bits;
        loop {
            let r = self.root.refined(k);
            let (lo, hi) = self.map.range_on(&r.lo, &r.hi);
            if Rational::from(&hi - &lo) < target || k > bits * 4 + 256 {
                return (lo, hi);
            }
            k += bits / 2 + 8;
        }
    }
}

fn interval_pow(lo: &Rational, hi: &Rational, n: u32) -> (Rational, Rational) {
    let a = super::rpow(lo, n);
    let b = super::rpow(hi, n);
    if n % 2 == 1 || *lo >= 0 {
        (a.clone().min(b.clone()), a.max(b))
    } else if *hi <= 0 {
        (b.clone().min(a.clone()), a.max(b))
    } else {
        (Rational::new(), a.max(b))
    }
}

/// Minimal polynomial of `q` in `ℚ[x]/(p)` by linear dependence of powers.
fn min_poly_in_algebra(p: &Poly, q: &Poly) -> Poly {
    let d = p.degree().unwrap_or(0).max(1);
    let vec_of = |f: &Poly| -> Vec<Rational> { (0..d).map(|k| f.coeff(k)).collect() };
    // rows: (reduced vector, combination of powers, pivot)
    let mut rows: Vec<(Vec<Rational>, Vec<Rational>, usize)> = Vec::new();
    let mut power = Poly::constant(Rational::from(1));
    for k in 0..=d {
        let mut v = vec_of(&power);
        let mut comb = vec![Rational::new(); d + 1];
        comb[k] = Rational::from(1);
        for (row, rcomb, piv) in &rows {
            if v[*piv] != 0 {
                let f = Rational::from(&v[*piv] / &row[*piv]);
                for j in 0..d {
                    v[j] -= Rational::from(&f * &row[j]);
                }
                for j in 0..=d {
                    comb[j] -= Rational::from(&f * &rcomb[j]);
                }
            }
        }
        match v.iter().position(|c| *c != 0) {
            Some(piv) => rows.push((v, comb, piv)),
            None => return Poly::new(comb).primitive(),
        }
        power = power.mul(q).rem(p);
    }
    unreachable!("d+1 vectors in dimension d are dependent")
}

fn canonical_algebraic(root: &AlgebraicRoot, q: &Poly) -> Real {
    let q = q.rem(&root.poly);
    if q.is_constant() {
        return Real::Rational(q.coeff(0));
    }
    let minp = min_poly_in_algebra(&root.poly, &q);
    let candidates = minp.real_roots(None, None);
    // an exact rational candidate is checked directly
    for c in &candidates {
        if let RealRoot::Rational(r) = c {
            if root.sign_of(&q.sub(&Poly::constant(r.clone()))) == Ordering::Equal {
                return Real::Rational(r.clone());
            }
        }
    }
    let value = AlgebraicValue {
        root: root.clone(),
        map: q.clone(),
    };
    let mut bits = 32;
    loop {
        let (lo, hi) = value.enclosure(bits);
        let hits: Vec<&AlgebraicRoot> = candidates
            .iter()
            .filter_map(|c| match c {
                RealRoot::Algebraic(a) => Some(a),
                RealRoot::Rational(_) => None,
            })
            .filter(|a| !(hi <= a.lo || lo >= a.hi))
            .collect();
        if hits.len() == 1 && lo > hits[0].lo && hi < hits[0].hi {
            let canon = hits[0].clone();
            if canon.poly.degree() == Some(2) {
                if let Some(s) = quadratic_surd(&canon) {
                    return Real::Surd(s);
                }
            }
            return Real::Algebraic(AlgebraicValue {
                root: canon,
                map: Poly::x(),
            });
        }
        if bits > 8192 {
            return Real::Algebraic(value);
        }
        bits *= 2;
    }
}

/// The root of a quadratic inside its isolating interval, as a surd.
fn quadratic_surd(a: &AlgebraicRoot) -> Option<QuadSurd> {
    let (c0, c1, c2) = (a.poly.coeff(0), a.poly.coeff(1), a.poly.coeff(2));
    let disc = Rational::from(c1.square_ref()) - Rational::from(&c0 * &c2) * 4u32;
    let root = QuadSurd::sqrt_of(&disc)?;
    let inv = Rational::from(&c2 * 2u32).recip();
    let base = Rational::from(-&c1) * &inv;
    [root.scale(&inv), root.scale(&inv).neg()]
        .into_iter()
        .map(|r| r.add_rational(&base))
        .find(|s| s.cmp_rational(&a.lo) == Ordering::Greater && s.cmp_rational(&a.hi) == Ordering::Less)
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational(r) => write!(f, "{}", fmt_rational(r)),
            Real::Surd(s) => write!(f, "{s}"),
            _ => {
                let v = self.to_float(64);
                write!(f, "~{}", v.to_string_radix(10, Some(15)))
            }
        }
    }
}
