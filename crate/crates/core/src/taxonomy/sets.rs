use std::cmp::Ordering;
use std::fmt;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::num::{fmt_rational, GaussRat, Real, Tri};

/// Structured subsets of the complex plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetExpr {
    AllPlane,
    PuncturedPlane,
    /// `{mⁿ : n ≥ 0}`, with 0 added when `include_zero`.
    Powers { ratio: Real, include_zero: bool },
    Finite { values: Vec<GaussRat> },
    ClosedDisk {
        #[serde(with = "crate::num::rational_string")]
        radius: Rational,
    },
    RealRay {
        #[serde(with = "crate::num::rational_string")]
        from: Rational,
        closed: bool,
    },
    Union { parts: Vec<SetExpr> },
    /// The set contains these parts; the remainder is unresolved.
    SupersetOf { parts: Vec<SetExpr> },
}

fn or(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Tri::Yes, _) | (_, Tri::Yes) => Tri::Yes,
        (Tri::No, Tri::No) => Tri::No,
        _ => Tri::Unknown,
    }
}

impl SetExpr {
    pub fn finite(values: &[i64]) -> SetExpr {
        SetExpr::Finite {
            values: values.iter().map(|&v| GaussRat::from_int(v)).collect(),
        }
    }

    pub fn powers(ratio: Real, include_zero: bool) -> SetExpr {
        SetExpr::Powers { ratio, include_zero }
    }

    pub fn is_resolved(&self) -> bool {
        match self {
            SetExpr::SupersetOf { .. } => false,
            SetExpr::Union { parts } => parts.iter().all(SetExpr::is_resolved),
            _ => true,
        }
    }

    /// Decides `λ ∈ self`; `SupersetOf` only answers yes for its listed parts.
    pub fn contains(&self, lambda: &GaussRat) -> Tri {
        match self {
            SetExpr::AllPlane => Tri::Yes,
            SetExpr::PuncturedPlane => Tri::from_bool(!lambda.is_zero()),
            SetExpr::Powers { ratio, include_zero } => {
                if lambda.is_zero() {
                    if *include_zero || ratio.sign() == Some(Ordering::Equal) {
                        return Tri::Yes;
                    }
                    return match ratio.sign() {
                        Some(_) => Tri::No,
                        None => Tri::Unknown,
                    };
                }
                if ratio.sign() == Some(Ordering::Equal) {
                    return Tri::from_bool(lambda.is_one());
                }
                ratio.log_of(lambda)
            }
            SetExpr::Finite { values } => Tri::from_bool(values.contains(lambda)),
            SetExpr::ClosedDisk { radius } => {
                Tri::from_bool(lambda.norm_sq() <= Rational::from(radius * radius))
            }
            SetExpr::RealRay { from, closed } => {
                if !lambda.is_real() {
                    return Tri::No;
                }
                Tri::from_bool(if *closed { lambda.re >= *from } else { lambda.re > *from })
            }
            SetExpr::Union { parts } => parts.iter().fold(Tri::No, |acc, p| or(acc, p.contains(lambda))),
            SetExpr::SupersetOf { parts } => {
                let inside = parts.iter().fold(Tri::No, |acc, p| or(acc, p.contains(lambda)));
                if inside == Tri::Yes {
                    Tri::Yes
                } else {
                    Tri::Unknown
                }
            }
        }
    }

    /// Flattens nested unions and drops duplicate parts.
    pub fn union(parts: Vec<SetExpr>) -> SetExpr {
        let mut flat: Vec<SetExpr> = Vec::new();
        for p in parts {
            let items = match p {
                SetExpr::Union { parts } => parts,
                other => vec![other],
            };
            for it in items {
                if !flat.contains(&it) {
                    flat.push(it);
                }
            }
        }
        if flat.len() == 1 {
            flat.pop().expect("one part")
        } else {
            SetExpr::Union { parts: flat }
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |parts: &[SetExpr]| parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ∪ ");
        match self {
            SetExpr::AllPlane => write!(f, "ℂ"),
            SetExpr::PuncturedPlane => write!(f, "ℂ∖{{0}}"),
            SetExpr::Powers { ratio, include_zero } => {
                write!(f, "{{({ratio})ⁿ : n ≥ 0}}")?;
                if *include_zero {
                    write!(f, " ∪ {{0}}")?;
                }
                Ok(())
            }
            SetExpr::Finite { values } => {
                let v: Vec<String> = values.iter().map(|z| z.to_string()).collect();
                write!(f, "{{{}}}", v.join(", "))
            }
            SetExpr::ClosedDisk { radius } => write!(f, "{{|λ| ≤ {}}}", fmt_rational(radius)),
            SetExpr::RealRay { from, closed } => {
                write!(f, "{}{}, +∞)", if *closed { "[" } else { "(" }, fmt_rational(from))
            }
            SetExpr::Union { parts } => write!(f, "{}", list(parts)),
            SetExpr::SupersetOf { parts } => write!(f, "⊇ {} (remainder unresolved)", list(parts)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    #[test]
    fn powers_membership() {
        let p = SetExpr::powers(Real::Rational(Rational::from((1, 2))), true);
        assert_eq!(p.contains(&g("1/8")), Tri::Yes);
        assert_eq!(p.contains(&g("1")), Tri::Yes);
        assert_eq!(p.contains(&g("0")), Tri::Yes);
        assert_eq!(p.contains(&g("3/8")), Tri::No);
        assert_eq!(p.contains(&g("i")), Tri::No);
        let q = SetExpr::powers(Real::from_int(-2), false);
        assert_eq!(q.contains(&g("-8")), Tri::Yes);
        assert_eq!(q.contains(&g("8")), Tri::No);
        assert_eq!(q.contains(&g("0")), Tri::No);
    }

    #[test]
    fn superset_is_partial() {
        let s = SetExpr::SupersetOf {
            parts: vec![SetExpr::finite(&[0]), SetExpr::RealRay { from: Rational::from(1), closed: true }],
        };
        assert_eq!(s.contains(&g("2")), Tri::Yes);
        assert_eq!(s.contains(&g("1/2")), Tri::Unknown);
        assert!(!s.is_resolved());
        let d = SetExpr::ClosedDisk { radius: Rational::from(1) };
        assert_eq!(d.contains(&g("3/5+4/5i")), Tri::Yes);
        assert_eq!(d.contains(&g("1+i")), Tri::No);
    }

    #[test]
    fn json_shape() {
        let s = SetExpr::powers(Real::Rational(Rational::from((1, 2))), true);
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["kind"], "powers");
        assert_eq!(v["include_zero"], true);
        let back: SetExpr = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
