//! Heuristic root finding for elementary functions: sign-change scan over a
//! grid, bisection, and snapping to simple rationals that check exactly.

use std::cmp::Ordering;

use rug::{Float, Rational};

use crate::num::simplest_between;
use crate::symbols::{sample_grid, Interval};

/// Points where `f` changes sign or vanishes on the grid, refined to about `prec` bits.
pub fn scan_roots(f: &dyn Fn(&Float) -> Float, j: &Interval, samples: usize, prec: u32) -> Vec<Float> {
    let grid = sample_grid(j, samples);
    let at = |x: &Rational| f(&Float::with_val(prec, x));
    let mut roots = Vec::new();
    let mut prev: Option<(Float, Float)> = None;
    for x in &grid {
        let xf = Float::with_val(prec, x);
        let v = at(x);
        if !v.is_finite() {
            prev = None;
            continue;
        }
        if v.is_zero() {
            roots.push(xf.clone());
            prev = None;
            continue;
        }
        if let Some((px, pv)) = &prev {
            if pv.cmp0() != v.cmp0() {
                roots.push(bisect(f, px.clone(), xf.clone(), pv.cmp0(), prec));
            }
        }
        prev = Some((xf, v));
    }
    roots
}

fn bisect(f: &dyn Fn(&Float) -> Float, mut a: Float, mut b: Float, sa: Option<Ordering>, prec: u32) -> Float {
    for _ in 0..(prec + 64) {
        let m = Float::with_val(prec, &a + &b) / 2u32;
        if m == a || m == b {
            break;
        }
        let v = f(&m);
        if v.is_zero() {
            return m;
        }
        if v.cmp0() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Float::with_val(prec, &a + &b) / 2u32
}

/// The simplest rational within `2^-(prec/2)` of `x` for which `check` holds.
pub fn snap_rational(x: &Float, prec: u32, check: impl Fn(&Rational) -> bool) -> Option<Rational> {
    let r = x.to_rational()?;
    let eps = Rational::from((1, rug::Integer::from(1) << (prec / 2)));
    let cand = simplest_between(&Rational::from(&r - &eps), &Rational::from(&r + &eps));
    if *cand.denom() > (rug::Integer::from(1) << 64) {
        return None;
    }
    check(&cand).then_some(cand)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sign_changes() {
        let f = |x: &Float| Float::with_val(x.prec(), x * x) - 2u32;
        let r = scan_roots(&f, &Interval::real_line(), 256, 128);
        assert_eq!(r.len(), 2);
        let s = Float::with_val(128, 2).sqrt();
        assert!(Float::with_val(128, &r[1] - &s).abs() < Float::with_val(128, 1) >> 120);
        let z = snap_rational(&Float::with_val(128, 0.5), 128, |q| *q == Rational::from((1, 2)));
        assert_eq!(z, Some(Rational::from((1, 2))));
    }
}
