//! Fixed points, multipliers, critical points and diffeomorphism
//! certificates of a symbol.

mod basin;
mod scan;

pub use basin::{attraction_basin_check, point_fate, BasinVerdict, PointFate};
pub use scan::{scan_roots, snap_rational};

use std::cmp::Ordering;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{Real, Tri, DEFAULT_PRECISION};
use crate::poly::{Poly, RealRoot};
use crate::symbols::{limit_at_end, sample_grid, AnalyticSymbol, Body, Interval, Limit, Value, GUARD_BITS};

/// Largest degree of `φ^[2]` expanded exactly.
pub const DEGREE_CAP: usize = 4096;

/// Grid size for scanning elementary symbols.
pub const SCAN_SAMPLES: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierKind {
    Superattracting,
    Attracting,
    Neutral,
    Repelling,
    /// The enclosure of `|m|` still meets 1 after refinement.
    #[serde(rename = "neutral?")]
    NeutralUnresolved,
}

impl MultiplierKind {
    pub fn of(m: &Real) -> MultiplierKind {
        if m.sign() == Some(Ordering::Equal) {
            return MultiplierKind::Superattracting;
        }
        match m.abs_cmp_one() {
            Some(Ordering::Less) => MultiplierKind::Attracting,
            Some(Ordering::Equal) => MultiplierKind::Neutral,
            Some(Ordering::Greater) => MultiplierKind::Repelling,
            None => MultiplierKind::NeutralUnresolved,
        }
    }

    /// `0 < |m| < 1` or `|m| > 1`.
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, MultiplierKind::Attracting | MultiplierKind::Repelling)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    pub location: Real,
    pub multiplier: Real,
    pub kind: MultiplierKind,
    /// Exact multiplicity as a root of `φ − id` (polynomials only).
    pub multiplicity: Option<usize>,
    /// For fixed points of `φ^[2]`: true when the point is not fixed by `φ`.
    #[serde(default)]
    pub two_cycle: bool,
}

impl FixedPointRecord {
    pub fn is_exact(&self) -> bool {
        self.location.is_exact() && self.multiplier.is_exact()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixedPointSet {
    /// The map is the identity on `J`.
    AllFixed,
    Points {
        points: Vec<FixedPointRecord>,
        /// False when found by a sign-change scan.
        exhaustive: bool,
    },
}

impl FixedPointSet {
    pub fn points(&self) -> &[FixedPointRecord] {
        match self {
            FixedPointSet::AllFixed => &[],
            FixedPointSet::Points { points, .. } => points,
        }
    }

    pub fn is_all(&self) -> bool {
        matches!(self, FixedPointSet::AllFixed)
    }

    pub fn is_exhaustive(&self) -> bool {
        match self {
            FixedPointSet::AllFixed => true,
            FixedPointSet::Points { exhaustive, .. } => *exhaustive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffeoCertificate {
    pub verdict: Tri,
    pub critical_free: Tri,
    pub onto: Tri,
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignVsId {
    Above,
    Below,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolAnalysis {
    pub fixed_points: FixedPointSet,
    pub fixed_points_sq: FixedPointSet,
    pub critical_points: Vec<Real>,
    pub is_diffeo: DiffeoCertificate,
    pub sign_vs_id: SignVsId,
    /// `None` when fixed points exist.
    pub critical_bounded_away: Option<Tri>,
    pub certified: bool,
}

fn record(location: Real, multiplier: Real, multiplicity: Option<usize>, two_cycle: bool) -> FixedPointRecord {
    FixedPointRecord {
        kind: MultiplierKind::of(&multiplier),
        location,
        multiplier,
        multiplicity,
        two_cycle,
    }
}

fn poly_fixed_points(p: &Poly, d: &Poly, j: &Interval, fixed_by: Option<&Poly>) -> FixedPointSet {
    let g = p.sub(&Poly::x());
    if g.is_zero() {
        return FixedPointSet::AllFixed;
    }
    let points = g
        .real_roots(j.lower(), j.upper())
        .into_iter()
        .map(|r| {
            let cycle = fixed_by.is_some_and(|h| !r.is_root_of(h));
            record(
                Real::of_root(&r, &Poly::x()),
                Real::of_root(&r, d),
                Some(g.multiplicity(&r)),
                cycle,
            )
        })
        .collect();
    FixedPointSet::Points {
        points,
        exhaustive: true,
    }
}

/// Multiplier at a numerically located point, refined to 512 bits when `|m|` vs 1 is unclear.
fn numeric_multiplier(body: &Body, x: &Float) -> Real {
    for prec in [DEFAULT_PRECISION, 512] {
        let xf = Float::with_val(prec + GUARD_BITS, x);
        let (_, d) = body.eval_with_derivative(&xf);
        let m = Real::approx(&Float::with_val(prec, &d));
        if m.abs_cmp_one().is_some() || prec == 512 {
            return m;
        }
    }
    unreachable!()
}

/// `body(x) = x` to half precision at every grid point: a numerical identity,
/// such as the second iterate of a conjugated involution.
fn numerically_identity(f: &dyn Fn(&Float) -> Float, j: &Interval, prec: u32) -> bool {
    let near_zero = |x: &Rational| {
        let xf = Float::with_val(prec, x);
        let scale = Float::with_val(prec, xf.abs_ref()).max(&Float::with_val(prec, 1));
        let v = f(&xf);
        v.is_finite() && Float::with_val(prec, v.abs() / scale) < (Float::with_val(prec, 1) >> (prec / 2))
    };
    sample_grid(j, 16).iter().all(near_zero) && sample_grid(j, SCAN_SAMPLES).iter().all(near_zero)
}

fn elementary_fixed_points(body: &Body, j: &Interval, fixed_by: Option<&Body>) -> FixedPointSet {
    let prec = DEFAULT_PRECISION;
    let f = |x: &Float| {
        let x = Float::with_val(prec + GUARD_BITS, x);
        Float::with_val(prec, body.eval_float(&x) - &x)
    };
    if numerically_identity(&f, j, prec) {
        return FixedPointSet::AllFixed;
    }
    let mut points = Vec::new();
    for x in scan_roots(&f, j, SCAN_SAMPLES, prec) {
        let exact = snap_rational(&x, prec, |r| body.eval_exact(r).as_ref() == Some(r));
        let (location, multiplier) = match &exact {
            Some(r) => {
                let m = match body.derivative_value(&Value::Exact(r.clone()), prec) {
                    Value::Exact(m) => Real::Rational(m),
                    Value::Approx(_) => numeric_multiplier(body, &x),
                };
                (Real::Rational(r.clone()), m)
            }
            None => (Real::approx(&x), numeric_multiplier(body, &x)),
        };
        let cycle = fixed_by.is_some_and(|h| {
            let xf = Float::with_val(prec, &x);
            let diff = Float::with_val(prec, h.eval_float(&xf) - &xf).abs();
            diff > Float::with_val(prec, 1) >> (prec / 2)
        });
        points.push(record(location, multiplier, None, cycle));
    }
    FixedPointSet::Points {
        points,
        exhaustive: false,
    }
}

pub fn find_fixed_points(phi: &AnalyticSymbol) -> FixedPointSet {
    match phi.body() {
        Body::Polynomial(p) => poly_fixed_points(p, &p.derivative(), phi.domain(), None),
        b => elementary_fixed_points(b, phi.domain(), None),
    }
}

pub fn find_fixed_points_second_iterate(phi: &AnalyticSymbol) -> Result<FixedPointSet> {
    find_fixed_points_second_iterate_capped(phi, DEGREE_CAP)
}

pub fn find_fixed_points_second_iterate_capped(phi: &AnalyticSymbol, cap: usize) -> Result<FixedPointSet> {
    match phi.body() {
        Body::Polynomial(p) => {
            let d = p.degree().unwrap_or(0);
            if d * d > cap {
                return Err(Error::DegreeOverflow { degree: d * d, cap });
            }
            let p2 = p.compose(p);
            let g1 = p.sub(&Poly::x());
            Ok(poly_fixed_points(&p2, &p2.derivative(), phi.domain(), Some(&g1)))
        }
        b => {
            let b2 = b.compose(b);
            Ok(elementary_fixed_points(&b2, phi.domain(), Some(b)))
        }
    }
}

/// Roots of `φ'` in `J`, and whether the list is complete.
pub fn critical_points(phi: &AnalyticSymbol) -> (Vec<Real>, bool) {
    let j = phi.domain();
    match phi.body() {
        Body::Polynomial(p) => {
            let roots = p.derivative().real_roots(j.lower(), j.upper());
            (roots.iter().map(|r| Real::of_root(r, &Poly::x())).collect(), true)
        }
        b => {
            let prec = DEFAULT_PRECISION;
            let f = |x: &Float| b.eval_with_derivative(&Float::with_val(prec + GUARD_BITS, x)).1;
            let pts = scan_roots(&f, j, SCAN_SAMPLES, prec)
                .into_iter()
                .map(|x| {
                    let exact = snap_rational(&x, prec, |r| {
                        b.derivative_value(&Value::Exact(r.clone()), prec) == Value::from_int(0)
                    });
                    exact.map_or_else(|| Real::approx(&x), Real::Rational)
                })
                .collect();
            (pts, false)
        }
    }
}

/// Extended-real end value.
#[derive(Clone, Debug, PartialEq)]
enum Ext {
    NegInf,
    Fin(Rational),
    Approx(Float),
    PosInf,
    Unknown,
}

fn end_value(phi: &AnalyticSymbol, upper: bool) -> Ext {
    let j = phi.domain();
    let end = if upper { j.upper() } else { j.lower() };
    match phi.body() {
        Body::Polynomial(p) => match end {
            Some(a) => Ext::Fin(p.eval(a)),
            None => match p.sign_at_infinity(upper) {
                Ordering::Greater => Ext::PosInf,
                Ordering::Less => Ext::NegInf,
                Ordering::Equal => Ext::Fin(p.coeff(0)),
            },
        },
        Body::Elementary(e) => match limit_at_end(e, j, upper, DEFAULT_PRECISION) {
            Limit::PlusInf => Ext::PosInf,
            Limit::MinusInf => Ext::NegInf,
            Limit::Finite(f) => Ext::Approx(f),
            Limit::Unknown => Ext::Unknown,
        },
    }
}

fn matches_end(v: &Ext, end: Option<&Rational>, upper: bool) -> Tri {
    match (v, end) {
        (Ext::Unknown, _) => Tri::Unknown,
        (Ext::PosInf, None) => Tri::from_bool(upper),
        (Ext::NegInf, None) => Tri::from_bool(!upper),
        (Ext::Fin(x), Some(a)) => Tri::from_bool(x == a),
        (Ext::Approx(x), Some(a)) => {
            let prec = x.prec();
            let close = Float::with_val(prec, x - a).abs() < Float::with_val(prec, 1) >> (prec - 16);
            if close {
                Tri::Unknown
            } else {
                Tri::No
            }
        }
        _ => Tri::No,
    }
}

fn and(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Tri::No, _) | (_, Tri::No) => Tri::No,
        (Tri::Yes, Tri::Yes) => Tri::Yes,
        _ => Tri::Unknown,
    }
}

pub fn is_diffeomorphism(phi: &AnalyticSymbol) -> DiffeoCertificate {
    let (crit, complete) = critical_points(phi);
    let critical_free = if !crit.is_empty() {
        Tri::No
    } else if complete {
        Tri::Yes
    } else {
        elementary_critical_free(phi)
    };
    let j = phi.domain();
    let lo = end_value(phi, false);
    let hi = end_value(phi, true);
    let increasing = and(matches_end(&lo, j.lower(), false), matches_end(&hi, j.upper(), true));
    let decreasing = and(matches_end(&lo, j.upper(), true), matches_end(&hi, j.lower(), false));
    let onto = match (increasing, decreasing) {
        (Tri::Yes, _) | (_, Tri::Yes) => Tri::Yes,
        (Tri::No, Tri::No) => Tri::No,
        _ => Tri::Unknown,
    };
    let verdict = and(critical_free, onto);
    DiffeoCertificate {
        verdict,
        critical_free,
        onto,
        certified: phi.body().is_polynomial(),
    }
}

/// For elementary bodies the scan found no critical point; report that as a heuristic yes.
fn elementary_critical_free(phi: &AnalyticSymbol) -> Tri {
    let prec = DEFAULT_PRECISION;
    let grid = sample_grid(phi.domain(), SCAN_SAMPLES);
    let signs: Vec<_> = grid
        .iter()
        .map(|x| phi.body().eval_with_derivative(&Float::with_val(prec, x)).1.cmp0())
        .collect();
    if signs.iter().all(|s| *s == signs[0] && s.is_some() && *s != Some(Ordering::Equal)) {
        Tri::Yes
    } else {
        Tri::Unknown
    }
}

/// Sign of `φ − id` on `J` when there are no fixed points.
pub fn sign_vs_identity(phi: &AnalyticSymbol) -> SignVsId {
    let x = phi.domain().sample_point();
    let s = match phi.body().eval_exact(&x) {
        Some(v) => v.cmp(&x),
        None => {
            let xf = Float::with_val(DEFAULT_PRECISION, &x);
            let v = phi.body().eval_float(&xf);
            v.partial_cmp(&xf).unwrap_or(Ordering::Equal)
        }
    };
    match s {
        Ordering::Greater => SignVsId::Above,
        Ordering::Less => SignVsId::Below,
        Ordering::Equal => SignVsId::NotApplicable,
    }
}

pub fn critical_set_bounded_away(phi: &AnalyticSymbol, end: End) -> Tri {
    if phi.body().is_polynomial() {
        // finitely many critical points
        return Tri::Yes;
    }
    let prec = DEFAULT_PRECISION;
    let grid = sample_grid(phi.domain(), SCAN_SAMPLES);
    let tail: Vec<&Rational> = match end {
        End::Upper => grid.iter().rev().take(SCAN_SAMPLES / 8).collect(),
        End::Lower => grid.iter().take(SCAN_SAMPLES / 8).collect(),
    };
    let signs: Vec<_> = tail
        .iter()
        .map(|x| phi.body().eval_with_derivative(&Float::with_val(prec, *x)).1.cmp0())
        .collect();
    let steady = signs
        .iter()
        .all(|s| s.is_some() && *s == signs[0] && *s != Some(Ordering::Equal));
    if steady {
        Tri::Yes
    } else {
        Tri::Unknown
    }
}

pub fn analyze(phi: &AnalyticSymbol) -> Result<SymbolAnalysis> {
    let fixed_points = find_fixed_points(phi);
    let fixed_points_sq = find_fixed_points_second_iterate(phi)?;
    let (critical_points, _) = critical_points(phi);
    let is_diffeo = is_diffeomorphism(phi);
    let no_fixed = !fixed_points.is_all() && fixed_points.points().is_empty();
    let sign_vs_id = if no_fixed {
        sign_vs_identity(phi)
    } else {
        SignVsId::NotApplicable
    };
    let critical_bounded_away = match sign_vs_id {
        SignVsId::Above => Some(critical_set_bounded_away(phi, End::Upper)),
        SignVsId::Below => Some(critical_set_bounded_away(phi, End::Lower)),
        SignVsId::NotApplicable => None,
    };
    let certified = phi.body().is_polynomial() && phi.invariance().certified;
    Ok(SymbolAnalysis {
        fixed_points,
        fixed_points_sq,
        critical_points,
        is_diffeo,
        sign_vs_id,
        critical_bounded_away,
        certified,
    })
}

/// Whether two located points coincide: exact for rationals, by 128-bit enclosures otherwise.
pub fn same_point(a: &Real, b: &Real) -> bool {
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        return x == y;
    }
    if let Some(y) = b.as_rational() {
        if a.is_exact() {
            return a.cmp_rational(y) == Some(Ordering::Equal);
        }
    }
    if let Some(x) = a.as_rational() {
        if b.is_exact() {
            return b.cmp_rational(x) == Some(Ordering::Equal);
        }
    }
    let (al, ah) = a.enclosure(128);
    let (bl, bh) = b.enclosure(128);
    al <= bh && bl <= ah
}

/// Exact root enclosure used in serialized reports.
pub fn root_enclosure(r: &RealRoot, bits: u32) -> (Rational, Rational) {
    r.enclosure(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::parse_symbol;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn sym(t: &str) -> AnalyticSymbol {
        parse_symbol(t, Interval::real_line()).unwrap()
    }

    #[test]
    fn quadratic_fixed_points() {
        let fp = find_fixed_points(&sym("-x^2+4*x"));
        let pts = fp.points();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].location.as_rational(), Some(&q(0, 1)));
        assert_eq!(pts[0].multiplier.as_rational(), Some(&q(4, 1)));
        assert_eq!(pts[1].location.as_rational(), Some(&q(3, 1)));
        assert_eq!(pts[1].multiplier.as_rational(), Some(&q(-2, 1)));
        assert!(pts.iter().all(|p| p.kind == MultiplierKind::Repelling));
    }

    #[test]
    fn cubic_fixed_points() {
        let pts = find_fixed_points(&sym("(x^3+x)/2")).points().to_vec();
        let locs: Vec<_> = pts.iter().map(|p| p.location.as_rational().unwrap().clone()).collect();
        assert_eq!(locs, vec![q(-1, 1), q(0, 1), q(1, 1)]);
        let ms: Vec<_> = pts.iter().map(|p| p.multiplier.as_rational().unwrap().clone()).collect();
        assert_eq!(ms, vec![q(2, 1), q(1, 2), q(2, 1)]);
    }

    #[test]
    fn arctan_fixed_point_is_exact() {
        let s = sym("1/2*arctan(x)");
        let fp = find_fixed_points(&s);
        assert_eq!(fp.points().len(), 1);
        assert_eq!(fp.points()[0].location.as_rational(), Some(&q(0, 1)));
        assert_eq!(fp.points()[0].multiplier.as_rational(), Some(&q(1, 2)));
        assert_eq!(fp.points()[0].kind, MultiplierKind::Attracting);
        let sq = find_fixed_points_second_iterate(&s).unwrap();
        assert_eq!(sq.points().len(), 1);
    }

    #[test]
    fn second_iterate() {
        assert!(find_fixed_points_second_iterate(&sym("-x")).unwrap().is_all());
        let sq = find_fixed_points_second_iterate(&sym("-x^2+x")).unwrap();
        assert_eq!(sq.points().len(), 1);
        assert_eq!(sq.points()[0].location.as_rational(), Some(&q(0, 1)));
        // 2-cycle of −x² + 4x: φ² − x has roots beyond the fixed points
        let sq = find_fixed_points_second_iterate(&sym("-x^2+4*x")).unwrap();
        assert_eq!(sq.points().iter().filter(|p| p.two_cycle).count(), 2);
        let big = AnalyticSymbol::polynomial(Poly::monomial(q(1, 1), 65), Interval::real_line()).unwrap();
        assert!(matches!(
            find_fixed_points_second_iterate(&big),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn diffeomorphism_certificates() {
        assert_eq!(is_diffeomorphism(&sym("(x^3+x)/2")).verdict, Tri::Yes);
        assert_eq!(is_diffeomorphism(&sym("x^2")).verdict, Tri::No);
        assert_eq!(is_diffeomorphism(&sym("1/2*arctan(x)")).verdict, Tri::No);
        assert_eq!(is_diffeomorphism(&sym("x+1")).verdict, Tri::Yes);
        assert_eq!(is_diffeomorphism(&sym("exp(1/2*x)")).onto, Tri::No);
    }

    #[test]
    fn bounded_away() {
        let s = sym("x^2+x+1");
        assert_eq!(sign_vs_identity(&s), SignVsId::Above);
        assert_eq!(critical_set_bounded_away(&s, End::Upper), Tri::Yes);
        let a = analyze(&sym("exp(1/2*x)")).unwrap();
        assert_eq!(a.sign_vs_id, SignVsId::Above);
        assert_eq!(a.critical_bounded_away, Some(Tri::Yes));
        assert!(a.fixed_points.points().is_empty());
    }
}
