use std::cmp::Ordering;

use rug::{Float, Rational};

use super::report::{ClassificationReport, DimLabel, EigenDim, REPORT_VERSION};
use super::SetExpr;
use crate::error::{Error, Result};
use crate::num::{QuadSurd, Real, Tri};
use crate::poly::Poly;
use crate::rootwork::{analyze, FixedPointRecord, MultiplierKind, SymbolAnalysis};
use crate::symbols::{normalize_quadratic, AnalyticSymbol, QuadraticNormalForm};

/// Which branch of the point-spectrum theorem applies.
#[derive(Clone, Debug, PartialEq)]
pub enum PointLeaf {
    /// No fixed points, critical set bounded away from the attracting end.
    NoFixedPoints,
    /// Unique fixed point of `φ^[2]` with this hyperbolic multiplier.
    Hyperbolic(Real),
    Involution,
    Identity,
    /// Only the constants are eigenfunctions.
    Constants,
}

impl PointLeaf {
    pub fn label(&self) -> &'static str {
        match self {
            PointLeaf::NoFixedPoints => "Thm 2.2(a)",
            PointLeaf::Hyperbolic(_) => "Thm 2.2(b1)",
            PointLeaf::Involution => "Thm 2.2(b2)",
            PointLeaf::Identity => "Thm 2.2(b3)",
            PointLeaf::Constants => "Thm 2.2(c)",
        }
    }

    pub fn sigma_p(&self) -> SetExpr {
        match self {
            PointLeaf::NoFixedPoints => SetExpr::PuncturedPlane,
            PointLeaf::Hyperbolic(m) => SetExpr::powers(m.clone(), false),
            PointLeaf::Involution => SetExpr::finite(&[-1, 1]),
            PointLeaf::Identity | PointLeaf::Constants => SetExpr::finite(&[1]),
        }
    }

    pub fn eigen(&self) -> EigenDim {
        let rest = (SetExpr::AllPlane, DimLabel::Zero);
        EigenDim::new(match self {
            PointLeaf::NoFixedPoints => vec![(SetExpr::PuncturedPlane, DimLabel::Infinite("A(T)".into())), rest],
            PointLeaf::Hyperbolic(m) => vec![(SetExpr::powers(m.clone(), false), DimLabel::Finite(1)), rest],
            PointLeaf::Involution => vec![(SetExpr::finite(&[-1, 1]), DimLabel::Infinite("A_+(R)".into())), rest],
            PointLeaf::Identity => vec![(SetExpr::finite(&[1]), DimLabel::WholeSpace), rest],
            PointLeaf::Constants => vec![(SetExpr::finite(&[1]), DimLabel::Finite(1)), rest],
        })
    }
}

fn unresolved(msg: impl Into<String>) -> Error {
    Error::Unresolved(msg.into())
}

/// The branch of the point-spectrum theorem selected by `a`.
pub fn point_leaf(a: &SymbolAnalysis) -> Result<PointLeaf> {
    if a.fixed_points.is_all() {
        return Ok(PointLeaf::Identity);
    }
    if a.fixed_points.points().is_empty() {
        return match a.critical_bounded_away {
            Some(Tri::Yes) => Ok(PointLeaf::NoFixedPoints),
            Some(Tri::No) => Ok(PointLeaf::Constants),
            _ => Err(unresolved("cannot decide whether the critical set is bounded away")),
        };
    }
    if a.fixed_points_sq.is_all() {
        return Ok(PointLeaf::Involution);
    }
    if a.fixed_points_sq.points().len() != 1 {
        return Ok(PointLeaf::Constants);
    }
    let u = sole_fixed_point(a)?;
    let m = &u.multiplier;
    match u.kind {
        MultiplierKind::Attracting => Ok(PointLeaf::Hyperbolic(m.clone())),
        MultiplierKind::Repelling => match a.is_diffeo.critical_free {
            Tri::Yes => Ok(PointLeaf::Hyperbolic(m.clone())),
            Tri::No => Ok(PointLeaf::Constants),
            Tri::Unknown => Err(unresolved("cannot decide whether φ has critical points")),
        },
        MultiplierKind::Superattracting | MultiplierKind::Neutral => Ok(PointLeaf::Constants),
        MultiplierKind::NeutralUnresolved => Err(unresolved(format!("multiplier {m} may have modulus 1"))),
    }
}

/// The fixed point of `φ` behind a unique fixed point of `φ^[2]`; its record
/// carries `φ'(u)` rather than `(φ^[2])'(u)`.
fn sole_fixed_point(a: &SymbolAnalysis) -> Result<&FixedPointRecord> {
    match a.fixed_points.points() {
        [u] => Ok(u),
        _ => Err(unresolved("fixed points of φ and φ^[2] do not match")),
    }
}

pub fn point_spectrum(a: &SymbolAnalysis) -> Result<(SetExpr, EigenDim)> {
    let leaf = point_leaf(a)?;
    Ok((leaf.sigma_p(), leaf.eigen()))
}

/// `{0}` (when not a diffeomorphism) ∪ σ_p ∪ the powers of every hyperbolic multiplier.
pub fn spectrum_lower_bound(a: &SymbolAnalysis) -> SetExpr {
    let mut parts = Vec::new();
    if a.is_diffeo.verdict == Tri::No {
        parts.push(SetExpr::finite(&[0]));
    }
    parts.push(point_leaf(a).map(|l| l.sigma_p()).unwrap_or_else(|_| SetExpr::finite(&[1])));
    for p in a.fixed_points.points() {
        if p.kind.is_hyperbolic() {
            parts.push(SetExpr::powers(p.multiplier.clone(), false));
        }
    }
    SetExpr::union(parts)
}

struct Leaf {
    case: &'static str,
    sigma: SetExpr,
    point: Option<PointLeaf>,
    open_problem: Option<&'static str>,
    citations: Vec<&'static str>,
    notes: Vec<String>,
    heuristic: bool,
}

impl Leaf {
    fn new(case: &'static str, sigma: SetExpr, point: PointLeaf, citations: &[&'static str]) -> Leaf {
        Leaf {
            case,
            sigma,
            point: Some(point),
            open_problem: None,
            citations: citations.to_vec(),
            notes: Vec::new(),
            heuristic: false,
        }
    }

    fn open(mut self, problem: &'static str) -> Leaf {
        self.open_problem = Some(problem);
        self
    }

    fn note(mut self, n: impl Into<String>) -> Leaf {
        self.notes.push(n.into());
        self
    }

    fn into_report(self, certified: bool) -> ClassificationReport {
        let (sigma_p, eigen) = match &self.point {
            Some(p) => (p.sigma_p(), p.eigen()),
            None => (SetExpr::finite(&[1]), PointLeaf::Constants.eigen()),
        };
        let mut citations: Vec<String> = self.citations.iter().map(|c| c.to_string()).collect();
        if let Some(p) = &self.point {
            if !citations.iter().any(|c| c == p.label()) {
                citations.push(p.label().to_string());
            }
        }
        ClassificationReport {
            version: REPORT_VERSION,
            case: self.case.to_string(),
            resolved: self.sigma.is_resolved(),
            sigma: self.sigma,
            sigma_p,
            eigen,
            open_problem: self.open_problem.map(str::to_string),
            certified: certified && !self.heuristic,
            citations,
            notes: self.notes,
        }
    }
}

fn superset(parts: Vec<SetExpr>) -> SetExpr {
    let parts = match SetExpr::union(parts) {
        SetExpr::Union { parts } => parts,
        one => vec![one],
    };
    SetExpr::SupersetOf { parts }
}

fn unresolved_report(case: &'static str, bound: SetExpr, reason: String) -> ClassificationReport {
    ClassificationReport {
        version: REPORT_VERSION,
        case: case.to_string(),
        sigma: superset(vec![bound]),
        sigma_p: SetExpr::finite(&[1]),
        eigen: PointLeaf::Constants.eigen(),
        resolved: false,
        open_problem: None,
        certified: false,
        citations: vec!["Prop 2.1".into()],
        notes: vec![reason],
    }
}

/// Classification of `C_φ` on the analytic functions of the domain of `φ`. Never fails:
/// undecidable situations come back as unresolved reports.
pub fn spectrum(phi: &AnalyticSymbol) -> ClassificationReport {
    match analyze(phi) {
        Ok(a) => spectrum_of(phi, &a),
        Err(e) => unresolved_report("unresolved", SetExpr::finite(&[1]), e.to_string()),
    }
}

pub fn spectrum_of(phi: &AnalyticSymbol, a: &SymbolAnalysis) -> ClassificationReport {
    let certified = a.certified && a.fixed_points.is_exhaustive() && a.fixed_points_sq.is_exhaustive();
    match select_leaf(phi, a) {
        Ok(leaf) => leaf.into_report(certified),
        Err(e) => unresolved_report("unresolved", spectrum_lower_bound(a), e.to_string()),
    }
}

fn with_zero(diffeo: Tri, parts: Vec<SetExpr>) -> Vec<SetExpr> {
    let mut parts = parts;
    if diffeo != Tri::Yes {
        parts.insert(0, SetExpr::finite(&[0]));
    }
    parts
}

fn select_leaf(phi: &AnalyticSymbol, a: &SymbolAnalysis) -> Result<Leaf> {
    let diffeo = a.is_diffeo.verdict;
    if a.fixed_points.is_all() {
        return Ok(Leaf::new("identity", SetExpr::finite(&[1]), PointLeaf::Identity, &["Thm 2.2(b3)"]));
    }
    if a.fixed_points.points().is_empty() {
        if diffeo == Tri::Yes {
            return Ok(Leaf::new(
                "Cor 3.1(a)",
                SetExpr::PuncturedPlane,
                PointLeaf::NoFixedPoints,
                &["Cor 3.1(a)", "Thm 2.2(a)", "Prop 2.1(1)"],
            ));
        }
        if diffeo == Tri::No && a.critical_bounded_away == Some(Tri::Yes) {
            return Ok(Leaf::new(
                "Cor 3.1(b)",
                SetExpr::AllPlane,
                PointLeaf::NoFixedPoints,
                &["Cor 3.1(b)", "Thm 2.2(a)", "Prop 2.1(1)"],
            ));
        }
        let point = point_leaf(a)?;
        let sigma = superset(with_zero(diffeo, vec![point.sigma_p()]));
        return Ok(Leaf::new("Problem 3.2", sigma, point, &["Prop 2.1(1)"]).open("Problem 3.2"));
    }
    if a.fixed_points_sq.is_all() {
        let leaf = Leaf::new(
            "Thm 2.2(b2)",
            SetExpr::finite(&[-1, 1]),
            PointLeaf::Involution,
            &["Thm 2.2(b2)"],
        );
        return Ok(leaf.note(
            "derived rule: (C_φ − λ)(C_φ + λ) = (1 − λ²)I, so C_φ − λ is invertible for λ ≠ ±1",
        ));
    }
    if a.fixed_points_sq.points().len() == 1 {
        return unique_fixed_point(phi, a, sole_fixed_point(a)?);
    }
    several_fixed_points(phi, a)
}

fn unique_fixed_point(phi: &AnalyticSymbol, a: &SymbolAnalysis, u: &FixedPointRecord) -> Result<Leaf> {
    let diffeo = a.is_diffeo.verdict;
    let m = u.multiplier.clone();
    match u.kind {
        MultiplierKind::Superattracting => Ok(Leaf::new(
            "Cor 3.6",
            SetExpr::finite(&[0, 1]),
            PointLeaf::Constants,
            &["Cor 3.6", "Thm 3.4", "Prop 2.1(1)"],
        )),
        MultiplierKind::Attracting => {
            if diffeo == Tri::Unknown {
                let sigma = superset(vec![SetExpr::powers(m.clone(), false)]);
                let leaf = Leaf::new("Cor 3.6", sigma, PointLeaf::Hyperbolic(m), &["Cor 3.6", "Thm 3.4"]);
                return Ok(leaf.note("could not decide whether φ is a diffeomorphism, so 0 ∈ σ is open"));
            }
            Ok(Leaf::new(
                "Cor 3.6",
                SetExpr::powers(m.clone(), diffeo == Tri::No),
                PointLeaf::Hyperbolic(m),
                &["Cor 3.6", "Thm 3.4", "Prop 2.1(1)"],
            ))
        }
        MultiplierKind::Repelling => {
            let point = point_leaf(a)?;
            match diffeo {
                Tri::Yes => Ok(Leaf::new(
                    "Cor 3.7",
                    SetExpr::powers(m, false),
                    point,
                    &["Cor 3.7", "Cor 3.6", "Prop 2.1(1)"],
                )),
                _ => {
                    let sigma = superset(vec![SetExpr::finite(&[0]), SetExpr::powers(m, false)]);
                    Ok(Leaf::new("Problem 3.8", sigma, point, &["Prop 2.1"]).open("Problem 3.8"))
                }
            }
        }
        MultiplierKind::Neutral => {
            if let Some(mu) = quadratic_mu(phi)? {
                return quadratic_leaf(&mu);
            }
            let sigma = superset(with_zero(diffeo, vec![SetExpr::finite(&[1])]));
            let leaf = Leaf::new("neutral fixed point", sigma, PointLeaf::Constants, &["Prop 2.1(1)"]);
            Ok(leaf.note("neutral multiplier outside the quadratic family"))
        }
        MultiplierKind::NeutralUnresolved => Err(unresolved(format!("multiplier {m} may have modulus 1"))),
    }
}

fn several_fixed_points(phi: &AnalyticSymbol, a: &SymbolAnalysis) -> Result<Leaf> {
    if let Some((s, heuristic)) = power_map_signature(phi, a) {
        let mut citations = vec!["Prop 3.12", "Lemma 3.13", "Thm 3.11", "Thm 3.4", "Prop 2.1(1)"];
        if s == 2 {
            // x² is affinely conjugate to −x² + 2x
            citations.push("Prop 4.4");
        }
        let mut leaf = Leaf::new("Prop 3.12", SetExpr::AllPlane, PointLeaf::Constants, &citations);
        leaf.heuristic = heuristic;
        return Ok(leaf);
    }
    if let Some(mu) = quadratic_mu(phi)? {
        return quadratic_leaf(&mu);
    }
    let pts = a.fixed_points.points();
    let hyperbolic = pts.iter().all(|p| p.kind.is_hyperbolic());
    if a.is_diffeo.verdict == Tri::Yes && hyperbolic && pts.len() > 1 {
        return Ok(Leaf::new(
            "Prop 3.9",
            SetExpr::PuncturedPlane,
            PointLeaf::Constants,
            &["Prop 3.9", "Prop 2.1(1)"],
        ));
    }
    let point = point_leaf(a)?;
    let leaf = Leaf::new("several fixed points", superset(vec![spectrum_lower_bound(a)]), point, &["Prop 2.1"]);
    Ok(leaf.note("no leaf of the taxonomy applies; σ is bounded below only"))
}

/// `μ` of the normal form `−x² + μx` for a quadratic polynomial on the real line.
fn quadratic_mu(phi: &AnalyticSymbol) -> Result<Option<QuadSurd>> {
    let Some(p) = phi.as_poly() else { return Ok(None) };
    if p.degree() != Some(2) || !phi.domain().is_real_line() {
        return Ok(None);
    }
    let c = p.coeffs();
    match normalize_quadratic(&c[2], &c[1], &c[0])? {
        QuadraticNormalForm::Normal { mu, .. } => Ok(Some(mu)),
        QuadraticNormalForm::NoFixedPoints => Ok(None),
    }
}

/// `Some((s, heuristic))` when `φ` looks like a conjugate of `x^s` on the real line:
/// exactly for polynomials `φ(u + t) − u = c·t^s`, by the fixed-point signature otherwise.
fn power_map_signature(phi: &AnalyticSymbol, a: &SymbolAnalysis) -> Option<(u32, bool)> {
    if !phi.domain().is_real_line() {
        return None;
    }
    let pts = a.fixed_points.points();
    let supers: Vec<&FixedPointRecord> = pts
        .iter()
        .filter(|p| p.kind == MultiplierKind::Superattracting)
        .collect();
    if supers.len() != 1 {
        return None;
    }
    if let Some(p) = phi.as_poly() {
        let u = supers[0].location.as_rational()?;
        let shifted = p.shift(u).sub(&Poly::constant(u.clone()));
        let s = shifted.degree()?;
        let monomial = s >= 2 && shifted.coeffs()[..s].iter().all(|c| *c == 0);
        let lead_ok = s % 2 == 0 || *shifted.leading()? > 0;
        return (monomial && lead_ok).then_some((s as u32, false));
    }
    let others: Vec<&FixedPointRecord> = pts
        .iter()
        .filter(|p| p.kind != MultiplierKind::Superattracting)
        .collect();
    let s = integer_multiplier(&others.first()?.multiplier)?;
    if s < 2 || others.iter().any(|p| integer_multiplier(&p.multiplier) != Some(s)) {
        return None;
    }
    if a.fixed_points_sq.points().len() != pts.len() {
        return None;
    }
    let u = supers[0].location.to_float(128);
    let side = |p: &&&FixedPointRecord| p.location.to_float(128) > u;
    let above = others.iter().filter(side).count();
    let below = others.len() - above;
    let shape_ok = if s % 2 == 0 {
        others.len() == 1
    } else {
        above == 1 && below == 1
    };
    shape_ok.then_some((s, true))
}

fn integer_multiplier(m: &Real) -> Option<u32> {
    let f = m.to_float(128);
    let n = f.to_f64().round();
    if !(1.0..=64.0).contains(&n) {
        return None;
    }
    let close = Float::with_val(128, &f - n).abs() < Float::with_val(128, 1) >> 64u32;
    close.then_some(n as u32)
}

fn surd_real(q: QuadSurd) -> Real {
    match q.as_rational() {
        Some(r) => Real::Rational(r.clone()),
        None => Real::Surd(q),
    }
}

fn quadratic_leaf(mu: &QuadSurd) -> Result<Leaf> {
    let one = Rational::from(1);
    let two = Rational::from(2);
    match (mu.cmp_rational(&one), mu.cmp_rational(&two)) {
        (Ordering::Less, _) => Err(Error::InvalidParameter(format!("μ = {mu} is below 1"))),
        (Ordering::Equal, _) => {
            let sigma = superset(vec![
                SetExpr::finite(&[0]),
                SetExpr::RealRay {
                    from: Rational::from(1),
                    closed: true,
                },
            ]);
            Ok(Leaf::new("Prop 4.1", sigma, PointLeaf::Constants, &["Prop 4.1", "Prop 4.2", "Lemma 3.13"])
                .open("Prop 4.1 partial"))
        }
        (_, Ordering::Less | Ordering::Equal) => Ok(Leaf::new(
            "Prop 4.4",
            SetExpr::AllPlane,
            PointLeaf::Constants,
            &["Prop 4.4", "Thm 3.11", "Lemma 3.13"],
        )
        .note(
            "the one-dimensional kernel claim for every λ conflicts with σ_p = {1}; kernels follow the point-spectrum theorem",
        )),
        _ => {
            let sigma = superset(vec![
                SetExpr::ClosedDisk { radius: one },
                SetExpr::powers(surd_real(mu.clone()), false),
                SetExpr::powers(surd_real(mu.neg().add_rational(&two)), false),
            ]);
            Ok(Leaf::new("Prop 4.5", sigma, PointLeaf::Constants, &["Prop 4.5", "Lemma 3.13"])
                .open("Prop 4.5 partial"))
        }
    }
}

/// The report for the normal form `−x² + μx` on the real line.
pub fn quadratic_spectrum(mu: &QuadSurd) -> Result<ClassificationReport> {
    Ok(quadratic_leaf(mu)?.into_report(true))
}
