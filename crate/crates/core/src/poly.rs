//! Dense univariate polynomials over ℚ, Sturm sequences and exact real
//! root isolation.

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use crate::num::fmt_rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    #[serde(with = "crate::num::rational_vec")]
    coeffs: Vec<Rational>,
}

impl Poly {
    /// Coefficients in ascending degree; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::new(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_float(&self, x: &Float) -> Float {
        let prec = x.prec();
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval(x).cmp0()
    }

    /// Sign of `p(x)` as `x → +∞` (`at_plus = true`) or `x → −∞`.
    pub fn sign_at_infinity(&self, at_plus: bool) -> Ordering {
        match self.leading() {
            None => Ordering::Equal,
            Some(lc) => {
                let s = lc.cmp0();
                if at_plus || self.degree().unwrap_or(0) % 2 == 0 {
                    s
                } else {
                    s.reverse()
                }
            }
        }
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Rational::from(c * k as u64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(Rational::from(1));
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// `p(x + c)`.
    pub fn shift(&self, c: &Rational) -> Poly {
        self.compose(&Poly::new(vec![c.clone(), Rational::from(1)]))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::new(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k] == 0 {
                continue;
            }
            let q = Rational::from(&rem[k] / &lc);
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[k - dd + j] -= Rational::from(&q * c);
            }
            quot[k - dd] = q;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Positive rational multiple with coprime integer coefficients.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut den = Integer::from(1);
        for c in &self.coeffs {
            den.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * &den) / c.denom())
            .collect();
        let mut g = Integer::new();
        for c in &ints {
            g.gcd_mut(c);
        }
        Poly::new(ints.into_iter().map(|c| Rational::from(c / &g)).collect())
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.primitive(), o.primitive());
        while !b.is_zero() {
            let r = a.rem(&b).primitive();
            a = b;
            b = r;
        }
        match a.leading() {
            None => a,
            Some(lc) => {
                let inv = Rational::from(lc.recip_ref());
                a.scale(&inv)
            }
        }
    }

    /// Squarefree part, primitive with positive leading coefficient.
    pub fn squarefree(&self) -> Poly {
        if self.is_constant() {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        let q = self.div_rem(&g).0.primitive();
        if q.leading().is_some_and(|c| *c < 0) {
            q.neg()
        } else {
            q
        }
    }

    /// Bound exceeding the absolute value of every real root.
    pub fn cauchy_bound(&self) -> Rational {
        let Some(lc) = self.leading() else {
            return Rational::from(1);
        };
        let lc_abs = Rational::from(lc.abs_ref());
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| Rational::from(c.abs_ref()) / &lc_abs)
            .max()
            .unwrap_or_default();
        m + 1u32
    }

    /// Range enclosure on `[lo, hi]` by interval Horner evaluation.
    pub fn range_on(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut a = Rational::new();
        let mut b = Rational::new();
        for c in self.coeffs.iter().rev() {
            let prods = [
                Rational::from(&a * lo),
                Rational::from(&a * hi),
                Rational::from(&b * lo),
                Rational::from(&b * hi),
            ];
            a = prods.iter().min().unwrap().clone() + c;
            b = prods.iter().max().unwrap().clone() + c;
        }
        (a, b)
    }

    pub fn sturm(&self) -> Sturm {
        Sturm::new(self)
    }

    /// Distinct real roots in the open interval `(lo, hi)`; `None` ends are infinite.
    pub fn count_roots(&self, lo: Option<&Rational>, hi: Option<&Rational>) -> usize {
        if self.is_constant() {
            return 0;
        }
        self.sturm().count_open(lo, hi)
    }

    /// Real roots in `(lo, hi)` in increasing order.
    pub fn real_roots(&self, lo: Option<&Rational>, hi: Option<&Rational>) -> Vec<RealRoot> {
        if self.is_constant() {
            return vec![];
        }
        let sf = self.squarefree();
        let sturm = sf.sturm();
        let bound = sf.cauchy_bound() + 1u32;
        let neg_bound = Rational::from(-&bound);
        let a = match lo {
            Some(l) if *l > neg_bound => l.clone(),
            _ => neg_bound,
        };
        let b = match hi {
            Some(h) if *h < bound => h.clone(),
            _ => bound,
        };
        if a >= b {
            return vec![];
        }
        let mut out = Vec::new();
        isolate(&sf, &sturm, a, b, &mut out);
        out.into_iter()
            .map(|r| match r {
                RealRoot::Algebraic(alg) => alg.detect_rational(),
                exact => exact,
            })
            .collect()
    }

    /// Multiplicity of a real root of `self` (0 if not a root).
    pub fn multiplicity(&self, root: &RealRoot) -> usize {
        let mut p = self.clone();
        let mut k = 0;
        while !p.is_zero() && root.is_root_of(&p) {
            k += 1;
            p = p.derivative();
        }
        k
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let abs = Rational::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let coef = fmt_rational(&abs);
            match (k, abs == 1) {
                (0, _) => write!(f, "{coef}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{coef}*x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{coef}*x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Sturm chain with every member scaled to a primitive integer polynomial
/// by a positive factor, so sign patterns are preserved.
#[derive(Clone, Debug)]
pub struct Sturm {
    chain: Vec<Poly>,
}

impl Sturm {
    pub fn new(p: &Poly) -> Self {
        let mut chain = vec![p.primitive()];
        let d = p.derivative().primitive();
        if d.is_zero() {
            return Sturm { chain };
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().primitive());
        }
        Sturm { chain }
    }

    pub fn chain(&self) -> &[Poly] {
        &self.chain
    }

    fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in signs.filter(|s| *s != Ordering::Equal) {
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Sign variations at `x`; `None` with `plus` selects ±∞.
    pub fn variations_at(&self, x: Option<&Rational>, plus: bool) -> usize {
        match x {
            Some(x) => Self::variations(self.chain.iter().map(|p| p.sign_at(x))),
            None => Self::variations(self.chain.iter().map(|p| p.sign_at_infinity(plus))),
        }
    }

    /// Distinct roots in `(lo, hi]`.
    pub fn count_half_open(&self, lo: Option<&Rational>, hi: Option<&Rational>) -> usize {
        let va = self.variations_at(lo, false);
        let vb = self.variations_at(hi, true);
        va.saturating_sub(vb)
    }

    /// Distinct roots in `(lo, hi)`.
    pub fn count_open(&self, lo: Option<&Rational>, hi: Option<&Rational>) -> usize {
        let n = self.count_half_open(lo, hi);
        match hi {
            Some(h) if self.chain[0].sign_at(h) == Ordering::Equal => n - 1,
            _ => n,
        }
    }
}

fn isolate(p: &Poly, sturm: &Sturm, a: Rational, b: Rational, out: &mut Vec<RealRoot>) {
    let n = sturm.count_open(Some(&a), Some(&b));
    if n == 0 {
        return;
    }
    let sa = p.sign_at(&a);
    let sb = p.sign_at(&b);
    if n == 1 && sa != Ordering::Equal && sb != Ordering::Equal {
        out.push(RealRoot::Algebraic(AlgebraicRoot {
            poly: p.clone(),
            lo: a,
            hi: b,
        }));
        return;
    }
    let mid = Rational::from(&a + &b) / 2u32;
    let root_at_mid = p.sign_at(&mid) == Ordering::Equal;
    isolate(p, sturm, a, mid.clone(), out);
    if root_at_mid {
        out.push(RealRoot::Rational(mid.clone()));
    }
    isolate(p, sturm, mid, b, out);
}

/// A real root: an exact rational, or an irrational algebraic number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealRoot {
    Rational(#[serde(with = "crate::num::rational_string")] Rational),
    Algebraic(AlgebraicRoot),
}

impl RealRoot {
    pub fn is_root_of(&self, q: &Poly) -> bool {
        match self {
            RealRoot::Rational(r) => q.sign_at(r) == Ordering::Equal,
            RealRoot::Algebraic(a) => a.sign_of(q) == Ordering::Equal,
        }
    }

    /// Sign of `q` at the root.
    pub fn sign_of(&self, q: &Poly) -> Ordering {
        match self {
            RealRoot::Rational(r) => q.sign_at(r),
            RealRoot::Algebraic(a) => a.sign_of(q),
        }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        match self {
            RealRoot::Rational(x) => x.cmp(r),
            RealRoot::Algebraic(a) => a.cmp_rational(r),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            RealRoot::Rational(r) => Some(r),
            RealRoot::Algebraic(_) => None,
        }
    }

    /// Rational enclosure of width below `2^-bits` (degenerate for rationals).
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        match self {
            RealRoot::Rational(r) => (r.clone(), r.clone()),
            RealRoot::Algebraic(a) => {
                let r = a.refined(bits);
                (r.lo, r.hi)
            }
        }
    }

    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            RealRoot::Rational(r) => Float::with_val(prec, r),
            RealRoot::Algebraic(a) => a.to_float(prec),
        }
    }

    /// Exact comparison of two real roots.
    pub fn cmp_root(&self, o: &RealRoot) -> Ordering {
        match (self, o) {
            (RealRoot::Rational(x), _) => o.cmp_rational(x).reverse(),
            (_, RealRoot::Rational(y)) => self.cmp_rational(y),
            (RealRoot::Algebraic(a), RealRoot::Algebraic(b)) => {
                if a.poly == b.poly {
                    // each interval holds exactly one root of the shared
                    // polynomial, so a root in the overlap is both of them
                    let lo = a.lo.clone().max(b.lo.clone());
                    let hi = a.hi.clone().min(b.hi.clone());
                    if lo < hi && a.poly.count_roots(Some(&lo), Some(&hi)) > 0 {
                        return Ordering::Equal;
                    }
                }
                if b.sign_of(&a.poly) == Ordering::Equal {
                    // b is a root of a's polynomial: equal iff inside a's interval
                    if a.cmp_rational(&b.lo) != Ordering::Less && a.cmp_rational(&b.hi) != Ordering::Greater {
                        let inside_lo = b.cmp_rational(&a.lo) == Ordering::Greater;
                        let inside_hi = b.cmp_rational(&a.hi) == Ordering::Less;
                        if inside_lo && inside_hi {
                            return Ordering::Equal;
                        }
                    }
                }
                let mut bits = 32;
                loop {
                    let ra = a.refined(bits);
                    let rb = b.refined(bits);
                    if ra.hi <= rb.lo {
                        return Ordering::Less;
                    }
                    if rb.hi <= ra.lo {
                        return Ordering::Greater;
                    }
                    bits *= 2;
                }
            }
        }
    }
}

impl fmt::Display for RealRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealRoot::Rational(r) => write!(f, "{}", fmt_rational(r)),
            RealRoot::Algebraic(a) => {
                let (lo, hi) = (a.refined(40).lo, a.refined(40).hi);
                let mid = Float::with_val(64, &(Rational::from(&lo + &hi) / 2u32));
                write!(f, "{}", mid.to_string_radix(10, Some(12)))
            }
        }
    }
}

/// The unique root of a squarefree rational polynomial inside `(lo, hi)`,
/// certified by `p(lo)·p(hi) < 0` and a Sturm count of one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicRoot {
    pub poly: Poly,
    #[serde(with = "crate::num::rational_string")]
    pub lo: Rational,
    #[serde(with = "crate::num::rational_string")]
    pub hi: Rational,
}

impl AlgebraicRoot {
    pub fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }

    /// Checks the sign-change certificate.
    pub fn certificate_holds(&self) -> bool {
        let sa = self.poly.sign_at(&self.lo);
        let sb = self.poly.sign_at(&self.hi);
        sa != Ordering::Equal && sb != Ordering::Equal && sa != sb
    }

    /// One bisection step, or the exact midpoint if it happens to be the root.
    pub fn bisect(&self) -> RealRoot {
        let mid = Rational::from(&self.lo + &self.hi) / 2u32;
        let sm = self.poly.sign_at(&mid);
        if sm == Ordering::Equal {
            return RealRoot::Rational(mid);
        }
        let sl = self.poly.sign_at(&self.lo);
        let (lo, hi) = if sm == sl {
            (mid, self.hi.clone())
        } else {
            (self.lo.clone(), mid)
        };
        RealRoot::Algebraic(AlgebraicRoot {
            poly: self.poly.clone(),
            lo,
            hi,
        })
    }

    /// Refined copy with width below `2^-bits`.
    pub fn refined(&self, bits: u32) -> AlgebraicRoot {
        let target = Rational::from((Integer::from(1), Integer::from(1) << bits));
        let mut cur = self.clone();
        while cur.width() >= target {
            match cur.bisect() {
                RealRoot::Algebraic(a) => cur = a,
                RealRoot::Rational(r) => {
                    return AlgebraicRoot {
                        poly: self.poly.clone(),
                        lo: Rational::from(&r - &target / Rational::from(4)),
                        hi: Rational::from(&r + &target / Rational::from(4)),
                    }
                }
            }
        }
        cur
    }

    /// Replaces the root by an exact rational when it is one.
    pub fn detect_rational(self) -> RealRoot {
        // rational roots of a primitive integer polynomial are multiples of 1/lc
        let prim = self.poly.primitive();
        let lc = Integer::from(prim.leading().unwrap().numer().abs_ref());
        let target = Rational::from((Integer::from(1), lc.clone()));
        let mut cur = self;
        while cur.width() >= target {
            match cur.bisect() {
                RealRoot::Algebraic(a) => cur = a,
                exact => return exact,
            }
        }
        let k_lo = Integer::from((&cur.lo * Rational::from(&lc)).ceil_ref());
        let k_hi = Integer::from((&cur.hi * Rational::from(&lc)).floor_ref());
        let mut k = k_lo;
        while k <= k_hi {
            let cand = Rational::from((k.clone(), lc.clone()));
            if prim.sign_at(&cand) == Ordering::Equal {
                return RealRoot::Rational(cand);
            }
            k += 1;
        }
        RealRoot::Algebraic(cur)
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if *r <= self.lo {
            return Ordering::Greater;
        }
        if *r >= self.hi {
            return Ordering::Less;
        }
        let sr = self.poly.sign_at(r);
        if sr == Ordering::Equal {
            // another root in the interval would contradict the certificate
            return Ordering::Equal;
        }
        if sr == self.poly.sign_at(&self.lo) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    /// Exact sign of `q` at the root.
    pub fn sign_of(&self, q: &Poly) -> Ordering {
        if q.is_zero() {
            return Ordering::Equal;
        }
        if q.is_constant() {
            return q.coeff(0).cmp0();
        }
        let g = self.poly.gcd(q);
        if !g.is_constant() && g.count_roots(Some(&self.lo), Some(&self.hi)) > 0 {
            return Ordering::Equal;
        }
        let qs = q.squarefree().sturm();
        let mut cur = self.clone();
        loop {
            let inside = qs.count_open(Some(&cur.lo), Some(&cur.hi));
            let lo_root = q.sign_at(&cur.lo) == Ordering::Equal;
            let hi_root = q.sign_at(&cur.hi) == Ordering::Equal;
            if inside == 0 && !lo_root && !hi_root {
                return q.sign_at(&cur.lo);
            }
            match cur.bisect() {
                RealRoot::Algebraic(a) => cur = a,
                RealRoot::Rational(r) => return q.sign_at(&r),
            }
        }
    }

    pub fn to_float(&self, prec: u32) -> Float {
        let r = self.refined(prec + 8);
        Float::with_val(prec, &(Rational::from(&r.lo + &r.hi) / 2u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn arithmetic_and_division() {
        let p = Poly::from_ints(&[1, 2, 1]);
        let d = Poly::from_ints(&[1, 1]);
        let (quo, rem) = p.div_rem(&d);
        assert_eq!(quo, d);
        assert!(rem.is_zero());
        assert_eq!(d.pow(2), p);
        assert_eq!(Poly::from_ints(&[0, 0, 1]).compose(&d), p);
        assert_eq!(p.shift(&q(-1, 1)), Poly::from_ints(&[0, 0, 1]));
        assert_eq!(p.to_string(), "x^2 + 2*x + 1");
        assert_eq!(Poly::from_ints(&[0, 3, -2]).scale(&q(1, 2)).to_string(), "-x^2 + 3/2*x");
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = Poly::from_ints(&[-1, 0, 1]); // (x-1)(x+1)
        let b = Poly::from_ints(&[-1, 1]).pow(3); // (x-1)^3
        assert_eq!(a.gcd(&b), Poly::from_ints(&[-1, 1]));
        assert_eq!(b.squarefree(), Poly::from_ints(&[-1, 1]));
    }

    #[test]
    fn sturm_counts_cubic_roots() {
        let p = Poly::from_ints(&[0, -1, 0, 1]); // x^3 - x
        assert_eq!(p.count_roots(None, None), 3);
        assert_eq!(p.count_roots(Some(&q(0, 1)), None), 1);
        assert_eq!(p.count_roots(Some(&q(-1, 1)), Some(&q(1, 1))), 1);
        assert_eq!(p.count_roots(Some(&q(-2, 1)), Some(&q(1, 1))), 2);
    }

    #[test]
    fn isolates_rational_and_irrational_roots() {
        let p = Poly::from_ints(&[0, -1, 0, 1]);
        let roots = p.real_roots(None, None);
        let vals: Vec<_> = roots.iter().map(|r| r.as_rational().cloned()).collect();
        assert_eq!(vals, vec![Some(q(-1, 1)), Some(q(0, 1)), Some(q(1, 1))]);

        let p = Poly::from_ints(&[-2, 0, 1]); // ±√2
        let roots = p.real_roots(None, None);
        assert_eq!(roots.len(), 2);
        let RealRoot::Algebraic(a) = &roots[1] else { panic!() };
        assert!(a.certificate_holds());
        let r = a.refined(100);
        assert!(r.certificate_holds());
        assert!(r.width() < q(1, 1) >> 99u32);
        assert_eq!(a.sign_of(&Poly::from_ints(&[-1, 1])), Ordering::Greater); // √2 - 1 > 0
        assert_eq!(a.sign_of(&Poly::from_ints(&[-3, 0, 1])), Ordering::Less); // 2 - 3
        assert_eq!(a.sign_of(&Poly::from_ints(&[-4, 0, 2])), Ordering::Equal);
        assert_eq!(roots[0].cmp_root(&roots[1]), Ordering::Less);
    }

    #[test]
    fn tangent_roots_are_found() {
        // -x^2 + x - x = -x^2 has a double root at 0 with no sign change
        let p = Poly::from_ints(&[0, 0, -1]);
        let roots = p.real_roots(None, None);
        assert_eq!(roots, vec![RealRoot::Rational(q(0, 1))]);
        assert_eq!(p.multiplicity(&roots[0]), 2);
        // (x^2-2)^2 keeps irrational double roots
        let p = Poly::from_ints(&[-2, 0, 1]).pow(2);
        let roots = p.real_roots(None, None);
        assert_eq!(roots.len(), 2);
        assert_eq!(p.multiplicity(&roots[0]), 2);
    }

    #[test]
    fn roots_respect_open_interval() {
        let p = Poly::from_ints(&[0, -1, 0, 1]);
        let roots = p.real_roots(Some(&q(0, 1)), Some(&q(1, 1)));
        assert!(roots.is_empty());
        let roots = p.real_roots(Some(&q(-1, 2)), Some(&q(2, 1)));
        assert_eq!(roots.len(), 2);
    }

    #[test]
    fn range_enclosure_contains_values() {
        let p = Poly::from_ints(&[1, -3, 0, 2]);
        let (lo, hi) = p.range_on(&q(-1, 1), &q(1, 2));
        for k in -10..=5 {
            let x = q(k, 10);
            let v = p.eval(&x);
            assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn degenerate_cases() {
        assert!(Poly::constant(q(3, 1)).real_roots(None, None).is_empty());
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(Poly::from_ints(&[5]).sign_at_infinity(false), Ordering::Greater);
        assert_eq!(Poly::from_ints(&[0, 1]).sign_at_infinity(false), Ordering::Less);
    }
}
