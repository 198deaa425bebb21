use std::cmp::Ordering;
use std::collections::HashSet;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{fmt_rational, DEFAULT_PRECISION};
use crate::poly::Poly;
use crate::symbols::{check_invariance, sample_grid, AnalyticSymbol, Body, Interval};

/// Numerator/denominator size beyond which orbits continue in floating point.
const EXACT_BITS: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointFate {
    Enters { depth: usize },
    Escapes { depth: usize, reason: String },
    Cycles { depth: usize, period: usize },
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasinVerdict {
    Certified { reason: String },
    SampledTrue { samples: usize, max_depth: usize },
    False { witness: String, fate: PointFate },
    /// Some sample neither entered the core nor provably escaped.
    Inconclusive { witness: String },
}

impl BasinVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, BasinVerdict::Certified { .. } | BasinVerdict::SampledTrue { .. })
    }
}

/// `R` with `|p(x)| ≥ 2|x|` whenever `|x| ≥ R`; `None` below degree 2.
fn escape_radius(p: &Poly) -> Option<Rational> {
    let d = p.degree()?;
    if d < 2 {
        return None;
    }
    let s: Rational = p.coeffs()[..d].iter().map(|c| Rational::from(c.abs_ref())).sum();
    let lead = Rational::from(p.coeffs()[d].abs_ref());
    Some(((s + 2u32) / lead).max(Rational::from(1)))
}

fn core_within(core: &Interval, r: &Rational) -> bool {
    let neg = Rational::from(-r);
    core.lower().is_some_and(|c| *c >= neg) && core.upper().is_some_and(|d| d <= r)
}

/// Follows the orbit of `x` until it enters `core`, provably escapes, or `max_depth` runs out.
pub fn point_fate(phi: &AnalyticSymbol, core: &Interval, x: &Rational, max_depth: usize) -> PointFate {
    let j = phi.domain();
    let radius = phi.as_poly().and_then(escape_radius).filter(|r| core_within(core, r));
    let escaped = |v: &Rational| radius.as_ref().is_some_and(|r| Rational::from(v.abs_ref()) >= *r);
    let mut seen: HashSet<Rational> = HashSet::new();
    let mut cur = x.clone();
    for depth in 0..=max_depth {
        if core.contains(&cur) {
            return PointFate::Enters { depth };
        }
        if !j.contains(&cur) {
            return PointFate::Escapes {
                depth,
                reason: "left the domain".into(),
            };
        }
        if escaped(&cur) {
            return PointFate::Escapes {
                depth,
                reason: "beyond the escape radius, |φ(x)| ≥ 2|x| from here on".into(),
            };
        }
        if !seen.insert(cur.clone()) {
            return PointFate::Cycles {
                depth,
                period: seen.len() - orbit_index(x, &cur, phi),
            };
        }
        let big = cur.numer().significant_bits() > EXACT_BITS || cur.denom().significant_bits() > EXACT_BITS;
        let next = if big { None } else { phi.body().eval_exact(&cur) };
        match next {
            Some(v) => cur = v,
            None => return float_fate(phi.body(), j, core, &cur, depth, max_depth),
        }
    }
    PointFate::Undecided
}

fn orbit_index(x: &Rational, target: &Rational, phi: &AnalyticSymbol) -> usize {
    let mut cur = x.clone();
    let mut k = 0;
    while cur != *target {
        cur = phi.body().eval_exact(&cur).expect("exact orbit");
        k += 1;
    }
    k
}

fn float_fate(body: &Body, j: &Interval, core: &Interval, x: &Rational, start: usize, max_depth: usize) -> PointFate {
    let prec = DEFAULT_PRECISION;
    let mut cur = Float::with_val(prec, x);
    let huge = Float::with_val(prec, 1) << 4096u32;
    for depth in start..=max_depth {
        if core.contains_float(&cur) {
            return PointFate::Enters { depth };
        }
        if !cur.is_finite() || !j.contains_float(&cur) || Float::with_val(prec, cur.abs_ref()) > huge {
            return PointFate::Escapes {
                depth,
                reason: "numerical divergence".into(),
            };
        }
        cur = body.eval_float(&cur);
    }
    PointFate::Undecided
}

/// Monotone-approach certificate for polynomials: on each side of the core
/// `φ − id` points toward it and `φ` never jumps across it.
fn monotone_certificate(p: &Poly, j: &Interval, core: &Interval) -> bool {
    let g = p.sub(&Poly::x());
    let side_ok = |lo: Option<&Rational>, hi: Option<&Rational>, end: &Rational, want: Ordering, far: Option<&Rational>| {
        // closed at `end`
        if g.count_roots(lo, hi) > 0 || g.sign_at(end) != want {
            return false;
        }
        match far {
            None => true,
            Some(f) => {
                let h = p.sub(&Poly::constant(f.clone()));
                h.count_roots(lo, hi) == 0 && h.sign_at(end) == want.reverse()
            }
        }
    };
    let left = match core.lower() {
        Some(c) if j.lower().is_none_or(|a| a < c) => {
            side_ok(j.lower(), Some(c), c, Ordering::Greater, core.upper())
        }
        _ => true,
    };
    let right = match core.upper() {
        Some(d) if j.upper().is_none_or(|b| d < b) => side_ok(Some(d), j.upper(), d, Ordering::Less, core.lower()),
        _ => true,
    };
    left && right
}

pub fn attraction_basin_check(
    phi: &AnalyticSymbol,
    core: &Interval,
    max_depth: usize,
    samples: usize,
) -> Result<BasinVerdict> {
    if !phi.domain().contains_interval(core) {
        return Err(Error::HypothesisViolation(format!("{core} is not inside {}", phi.domain())));
    }
    check_invariance(phi.body(), core).map_err(|e| Error::HypothesisViolation(format!("φ(core) ⊄ core: {e}")))?;
    if let Some(p) = phi.as_poly() {
        if monotone_certificate(p, phi.domain(), core) {
            return Ok(BasinVerdict::Certified {
                reason: "φ − id points toward the core on both sides and φ does not jump across it".into(),
            });
        }
    }
    let mut undecided = None;
    for x in sample_grid(phi.domain(), samples) {
        match point_fate(phi, core, &x, max_depth) {
            PointFate::Enters { .. } => {}
            PointFate::Undecided => {
                undecided.get_or_insert(x);
            }
            fate => {
                return Ok(BasinVerdict::False {
                    witness: fmt_rational(&x),
                    fate,
                })
            }
        }
    }
    Ok(match undecided {
        Some(x) => BasinVerdict::Inconclusive {
            witness: fmt_rational(&x),
        },
        None => BasinVerdict::SampledTrue { samples, max_depth },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::parse_symbol;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn contraction_is_certified() {
        let phi = parse_symbol("x/2", Interval::real_line()).unwrap();
        let core = Interval::finite(q(-1, 1), q(1, 1)).unwrap();
        let v = attraction_basin_check(&phi, &core, 100, 64).unwrap();
        assert!(matches!(v, BasinVerdict::Certified { .. }));
    }

    #[test]
    fn parabolic_basin_is_certified() {
        let j = Interval::finite(q(0, 1), q(1, 1)).unwrap();
        let phi = parse_symbol("-x^2+x", j).unwrap();
        let core = Interval::finite(q(0, 1), q(1, 4)).unwrap();
        let v = attraction_basin_check(&phi, &core, 100, 64).unwrap();
        assert!(matches!(v, BasinVerdict::Certified { .. }));
    }

    #[test]
    fn square_escapes() {
        let phi = parse_symbol("x^2", Interval::real_line()).unwrap();
        let core = Interval::finite(q(-1, 2), q(1, 2)).unwrap();
        assert!(matches!(point_fate(&phi, &core, &q(2, 1), 100), PointFate::Escapes { depth: 0, .. }));
        assert!(matches!(point_fate(&phi, &core, &q(1, 1), 100), PointFate::Cycles { period: 1, .. }));
        let v = attraction_basin_check(&phi, &core, 100, 64).unwrap();
        assert!(matches!(v, BasinVerdict::False { .. }));
        let bad = Interval::finite(q(1, 2), q(2, 1)).unwrap();
        assert!(matches!(
            attraction_basin_check(&phi, &bad, 10, 8),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn arctan_basin_is_sampled() {
        let phi = parse_symbol("1/2*arctan(x)", Interval::real_line()).unwrap();
        let core = Interval::finite(q(-1, 1), q(1, 1)).unwrap();
        let v = attraction_basin_check(&phi, &core, 1000, 64).unwrap();
        assert!(matches!(v, BasinVerdict::SampledTrue { .. }));
    }
}
