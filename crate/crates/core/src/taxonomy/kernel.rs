use std::fmt;

use rug::Rational;
use serde::{Deserialize, Serialize};

use super::classify::point_leaf;
use super::report::DimLabel;
use crate::error::{Error, Result};
use crate::num::GaussRat;
use crate::rootwork::analyze;
use crate::symbols::{check_invariance, check_maps_into, AnalyticSymbol, Interval};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum KernelDim {
    Finite(usize),
    Infinite(String),
}

impl KernelDim {
    pub fn is_finite(&self) -> bool {
        matches!(self, KernelDim::Finite(_))
    }

    fn plus(self, o: KernelDim) -> KernelDim {
        match (self, o) {
            (KernelDim::Finite(a), KernelDim::Finite(b)) => KernelDim::Finite(a + b),
            (KernelDim::Infinite(t), _) | (_, KernelDim::Infinite(t)) => KernelDim::Infinite(t),
        }
    }
}

impl fmt::Display for KernelDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelDim::Finite(k) => write!(f, "{k}"),
            KernelDim::Infinite(t) => write!(f, "∞ ({t})"),
        }
    }
}

/// `dim ker(C_φ − λ)` on the analytic functions of an invariant interval `u`.
/// For `λ = 0` the kernel is trivial because `φ` is not constant.
pub fn kernel_dim(phi: &AnalyticSymbol, u: &Interval, lambda: &GaussRat) -> Result<KernelDim> {
    let restricted = phi.restrict(u)?;
    if lambda.is_zero() {
        return Ok(KernelDim::Finite(0));
    }
    let a = analyze(&restricted)?;
    let leaf = point_leaf(&a)?;
    let eigen = leaf.eigen();
    match eigen.at(lambda) {
        Some(DimLabel::Zero) => Ok(KernelDim::Finite(0)),
        Some(DimLabel::Finite(k)) => Ok(KernelDim::Finite(*k)),
        Some(DimLabel::Infinite(t)) => Ok(KernelDim::Infinite(t.clone())),
        Some(DimLabel::WholeSpace) => Ok(KernelDim::Infinite(format!("A{u}"))),
        None => Err(Error::Unresolved(format!("membership of {lambda} in σ_p on {u} is undecided"))),
    }
}

/// An open set given as disjoint intervals. With `determining = Some(k)`, every
/// other part is mapped into part `k`, so kernel elements are fixed by their
/// restriction to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub parts: Vec<Interval>,
    #[serde(default)]
    pub determining: Option<usize>,
}

impl Piece {
    pub fn interval(j: Interval) -> Piece {
        Piece {
            parts: vec![j],
            determining: None,
        }
    }

    pub fn union(parts: Vec<Interval>, determining: usize) -> Piece {
        Piece {
            parts,
            determining: Some(determining),
        }
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.parts.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", p.join(" ∪ "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoveringVerdict {
    NotSurjective,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceKernel {
    pub piece: Piece,
    pub kernel: KernelDim,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionKernel {
    pub pieces: (usize, usize),
    pub set: Piece,
    pub kernel: KernelDim,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringObstruction {
    pub lambda: GaussRat,
    pub pieces: Vec<PieceKernel>,
    pub intersections: Vec<IntersectionKernel>,
    pub verdict: CoveringVerdict,
}

fn disjoint(parts: &[Interval]) -> bool {
    parts
        .iter()
        .enumerate()
        .all(|(i, a)| parts[i + 1..].iter().all(|b| a.intersect(b).is_none()))
}

fn maps_into(phi: &AnalyticSymbol, from: &Interval, to: &Interval) -> bool {
    check_maps_into(phi.body(), from, to).is_ok()
}

/// Kernel on a union of parts, reduced to the determining part when there is one.
fn union_kernel(phi: &AnalyticSymbol, piece: &Piece, lambda: &GaussRat) -> Result<(KernelDim, bool)> {
    let parts = &piece.parts;
    if parts.len() == 1 {
        let cert = check_invariance(phi.body(), &parts[0])?;
        return Ok((kernel_dim(phi, &parts[0], lambda)?, cert.certified));
    }
    if !disjoint(parts) {
        return Err(Error::HypothesisViolation(format!("the parts of {piece} overlap")));
    }
    if let Some(k) = piece.determining {
        let det = parts
            .get(k)
            .ok_or_else(|| Error::InvalidParameter(format!("no part {k} in {piece}")))?;
        let cert = check_invariance(phi.body(), det)?;
        for (i, p) in parts.iter().enumerate() {
            if i != k && !maps_into(phi, p, det) {
                return Err(Error::InvarianceFailure {
                    message: format!("{p} is not mapped into the determining part {det}"),
                    witness: Some(p.sample_point().to_string()),
                });
            }
        }
        if lambda.is_zero() {
            return Ok((KernelDim::Finite(0), cert.certified));
        }
        return Ok((kernel_dim(phi, det, lambda)?, cert.certified));
    }
    let mut total = KernelDim::Finite(0);
    let mut certified = true;
    for p in parts {
        let cert = check_invariance(phi.body(), p).map_err(|_| {
            Error::HypothesisViolation(format!("{piece} needs a determining part: {p} is not invariant"))
        })?;
        certified &= cert.certified;
        total = total.plus(kernel_dim(phi, p, lambda)?);
    }
    Ok((total, certified))
}

/// Picks a determining part for an intersection, if one exists.
fn with_determining(phi: &AnalyticSymbol, parts: Vec<Interval>) -> Piece {
    if parts.len() > 1 {
        for (k, d) in parts.iter().enumerate() {
            let invariant = check_invariance(phi.body(), d).is_ok();
            if invariant && parts.iter().enumerate().all(|(i, p)| i == k || maps_into(phi, p, d)) {
                return Piece::union(parts, k);
            }
        }
    }
    Piece {
        parts,
        determining: None,
    }
}

fn check_cover(j: &Interval, pieces: &[Piece]) -> Result<()> {
    let parts: Vec<&Interval> = pieces.iter().flat_map(|p| p.parts.iter()).collect();
    for p in &parts {
        if !j.contains_interval(p) {
            return Err(Error::Domain(format!("{p} is not inside {j}")));
        }
    }
    // sweep: every point of J below `reach` is covered
    let mut reach: Option<Rational> = j.lower().cloned();
    let mut first = true;
    loop {
        if let (Some(r), Some(b)) = (&reach, j.upper()) {
            if r >= b {
                return Ok(());
            }
        }
        let mut best: Option<Option<&Rational>> = None;
        for p in &parts {
            let usable = match (p.lower(), &reach) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(a), Some(r)) => a < r || (first && a == r),
            };
            if !usable {
                continue;
            }
            best = match (best, p.upper()) {
                (_, None) | (Some(None), _) => Some(None),
                (None, Some(u)) => Some(Some(u)),
                (Some(Some(b)), Some(u)) => Some(Some(if u > b { u } else { b })),
            };
        }
        match best {
            Some(None) => return Ok(()),
            Some(Some(u)) if reach.as_ref().is_none_or(|r| u > r) => {
                reach = Some(u.clone());
                first = false;
            }
            _ => break,
        }
    }
    let at = reach.map_or("-inf".to_string(), |r| r.to_string());
    Err(Error::HypothesisViolation(format!("the pieces do not cover {j} near {at}")))
}

/// Compares kernels on the pieces of an invariant cover with kernels on their
/// pairwise intersections; finite pieces and an infinite intersection rule out surjectivity.
pub fn covering_obstruction(phi: &AnalyticSymbol, lambda: &GaussRat, pieces: &[Piece]) -> Result<CoveringObstruction> {
    if pieces.is_empty() {
        return Err(Error::InvalidParameter("no pieces given".into()));
    }
    check_cover(phi.domain(), pieces)?;
    let mut reports = Vec::new();
    for p in pieces {
        let (kernel, certified) = union_kernel(phi, p, lambda)?;
        reports.push(PieceKernel {
            piece: p.clone(),
            kernel,
            certified,
        });
    }
    let mut intersections = Vec::new();
    for i in 0..pieces.len() {
        for k in i + 1..pieces.len() {
            let parts: Vec<Interval> = pieces[i]
                .parts
                .iter()
                .flat_map(|a| pieces[k].parts.iter().filter_map(move |b| a.intersect(b)))
                .collect();
            if parts.is_empty() {
                continue;
            }
            let set = with_determining(phi, parts);
            let (kernel, _) = union_kernel(phi, &set, lambda)?;
            intersections.push(IntersectionKernel {
                pieces: (i, k),
                set,
                kernel,
            });
        }
    }
    let all_finite = reports.iter().all(|r| r.kernel.is_finite());
    let some_infinite = intersections.iter().any(|r| !r.kernel.is_finite());
    let verdict = if all_finite && some_infinite {
        CoveringVerdict::NotSurjective
    } else {
        CoveringVerdict::Inconclusive
    };
    Ok(CoveringObstruction {
        lambda: lambda.clone(),
        pieces: reports,
        intersections,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::parse_symbol;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn iv(lo: Option<(i64, i64)>, hi: Option<(i64, i64)>) -> Interval {
        Interval::new(lo.map(|(n, d)| q(n, d)), hi.map(|(n, d)| q(n, d))).unwrap()
    }

    fn g(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    #[test]
    fn kernel_examples() {
        let at = parse_symbol("1/2*arctan(x)", Interval::real_line()).unwrap();
        assert_eq!(kernel_dim(&at, &Interval::real_line(), &g("1/8")).unwrap(), KernelDim::Finite(1));
        assert_eq!(kernel_dim(&at, &Interval::real_line(), &g("1/3")).unwrap(), KernelDim::Finite(0));
        let quad = parse_symbol("-x^2+3/2*x", Interval::real_line()).unwrap();
        let u = iv(Some((0, 1)), Some((1, 2)));
        assert_eq!(kernel_dim(&quad, &u, &g("7")).unwrap(), KernelDim::Infinite("A(T)".into()));
        let neg = parse_symbol("-x", Interval::real_line()).unwrap();
        assert_eq!(
            kernel_dim(&neg, &Interval::real_line(), &g("1")).unwrap(),
            KernelDim::Infinite("A_+(R)".into())
        );
        assert_eq!(kernel_dim(&neg, &Interval::real_line(), &g("0")).unwrap(), KernelDim::Finite(0));
        let bad = iv(Some((1, 1)), Some((2, 1)));
        assert!(matches!(kernel_dim(&quad, &bad, &g("2")), Err(Error::InvarianceFailure { .. })));
    }

    #[test]
    fn cube_obstruction() {
        let phi = parse_symbol("x^3", Interval::real_line()).unwrap();
        let pieces = vec![
            Piece::interval(iv(None, Some((0, 1)))),
            Piece::interval(iv(Some((-1, 1)), Some((1, 1)))),
            Piece::interval(iv(Some((0, 1)), None)),
        ];
        for l in ["2", "-1", "1/2", "i"] {
            let c = covering_obstruction(&phi, &g(l), &pieces).unwrap();
            assert_eq!(c.verdict, CoveringVerdict::NotSurjective, "λ = {l}");
            assert_eq!(c.intersections.len(), 2);
        }
        let single = covering_obstruction(&phi, &g("2"), &[Piece::interval(Interval::real_line())]).unwrap();
        assert_eq!(single.verdict, CoveringVerdict::Inconclusive);
    }

    #[test]
    fn quadratic_obstruction() {
        for (mu, text) in [((3, 2), "-x^2+3/2*x"), ((2, 1), "-x^2+2*x")] {
            let phi = parse_symbol(text, Interval::real_line()).unwrap();
            let m1 = (mu.0 - mu.1, mu.1);
            let pieces = vec![
                Piece::union(vec![iv(None, Some(m1)), iv(Some((1, 1)), None)], 0),
                Piece::interval(iv(Some((0, 1)), Some(mu))),
            ];
            for l in ["2", "-1"] {
                let c = covering_obstruction(&phi, &g(l), &pieces).unwrap();
                assert_eq!(c.verdict, CoveringVerdict::NotSurjective, "{text} λ = {l}");
            }
        }
    }

    #[test]
    fn cover_gaps_are_rejected() {
        let phi = parse_symbol("x^3", Interval::real_line()).unwrap();
        let pieces = vec![
            Piece::interval(iv(None, Some((0, 1)))),
            Piece::interval(iv(Some((0, 1)), None)),
        ];
        assert!(matches!(
            covering_obstruction(&phi, &g("2"), &pieces),
            Err(Error::HypothesisViolation(_))
        ));
    }
}
