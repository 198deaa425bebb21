mod common;

use common::{q, small_rational};
use compspec::num::Real;
use compspec::poly::Poly;
use compspec::symbols::{
    conjugate, eval_exact, normalize_quadratic, AnalyticSymbol, Diffeomorphism, Expr, Interval, QuadraticNormalForm, Value,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};
use std::cmp::Ordering;

fn poly_of(coeffs: &[(i64, i64)]) -> Poly {
    Poly::new(coeffs.iter().map(|&(n, d)| q(n, d)).collect())
}

fn coeff_strategy(max_len: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-6i64..=6, 1i64..=5), 2..=max_len)
}

fn factorial(k: usize) -> Integer {
    Integer::from(Integer::factorial(k as u32))
}

fn line(p: Poly) -> Option<AnalyticSymbol> {
    AnalyticSymbol::polynomial(p, Interval::real_line()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_matches_symbolic_derivatives(coeffs in coeff_strategy(7), c in (-4i64..=4, 1i64..=3), order in 0usize..=6) {
        let p = poly_of(&coeffs);
        prop_assume!(!p.is_constant());
        let phi = line(p.clone()).unwrap();
        let center = q(c.0, c.1);
        let jet = phi.jet(&Real::Rational(center.clone()), order, 128).unwrap();
        let jet = jet.as_exact().expect("polynomial jets are exact").clone();
        let mut d = Expr::from_poly(&p);
        for k in 0..=order {
            let coeff = jet.coeff(k);
            prop_assert!(coeff.is_real());
            let scaled = Rational::from(&coeff.re * factorial(k));
            prop_assert_eq!(&scaled, &eval_exact(&d, &center).unwrap(), "k = {}", k);
            prop_assert_eq!(&scaled, &p.nth_derivative(k).eval(&center));
            d = d.derivative().unwrap();
        }
    }

    #[test]
    fn iteration_composes(coeffs in coeff_strategy(3), x in (-3i64..=3, 1i64..=3), m in 0usize..=3, n in 0usize..=2) {
        let p = poly_of(&coeffs);
        prop_assume!(!p.is_constant());
        let phi = line(p).unwrap();
        let x = Value::Exact(q(x.0, x.1));
        let whole = phi.iterate(m + n, &x, 128).unwrap();
        let inner = phi.iterate(n, &x, 128).unwrap();
        let split = phi.iterate(m, &inner, 128).unwrap();
        prop_assert!(whole.is_exact());
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn affine_conjugation_round_trip(coeffs in coeff_strategy(5), s in (1i64..=5, 1i64..=4, any::<bool>()), t in (-5i64..=5, 1i64..=4)) {
        let p = poly_of(&coeffs);
        prop_assume!(!p.is_constant());
        let phi = line(p).unwrap();
        let slope = if s.2 { q(s.0, s.1) } else { -q(s.0, s.1) };
        let delta = Diffeomorphism::affine(slope, q(t.0, t.1)).unwrap();
        let psi = conjugate(&phi, &delta).unwrap();
        let back = conjugate(&psi, &delta.inverse()).unwrap();
        for k in -10..10 {
            let x = Value::Exact(q(k, 3));
            prop_assert_eq!(phi.eval(&x, 128).unwrap(), back.eval(&x, 128).unwrap());
        }
    }

    #[test]
    fn normal_form_has_mu_at_least_one(a in (1i64..=6, 1i64..=4, any::<bool>()), b in (-8i64..=8, 1i64..=4), c in (-8i64..=8, 1i64..=4)) {
        let a = if a.2 { q(a.0, a.1) } else { -q(a.0, a.1) };
        match normalize_quadratic(&a, &q(b.0, b.1), &q(c.0, c.1)).unwrap() {
            QuadraticNormalForm::Normal { mu, .. } => prop_assert_ne!(mu.cmp_rational(&Rational::from(1)), Ordering::Less),
            QuadraticNormalForm::NoFixedPoints => {}
        }
    }
}

#[test]
fn conjugation_round_trip_for_transcendental_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for text in ["1/2*arctan(x)", "exp(x/2)", "sin(x)/3"] {
        let phi = common::sym(text);
        for _ in 0..3 {
            let mut s = small_rational(&mut rng, 4, 3);
            if s == 0 {
                s = Rational::from(2);
            }
            let delta = Diffeomorphism::affine(s, small_rational(&mut rng, 4, 3)).unwrap();
            let back = conjugate(&conjugate(&phi, &delta).unwrap(), &delta.inverse()).unwrap();
            for k in -10..10 {
                let x = Value::Exact(q(k, 4));
                let a = phi.eval(&x, 256).unwrap().to_float(256);
                let b = back.eval(&x, 256).unwrap().to_float(256);
                let diff = rug::Float::with_val(256, &a - &b).abs();
                assert!(diff < 1e-60, "{text} at {x}: {diff}");
            }
        }
    }
}
