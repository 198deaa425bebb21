mod common;

use common::{body, g, q, small_rational, sym};
use compspec::num::{rpow, GaussRat, Real, DEFAULT_PRECISION};
use compspec::poly::Poly;
use compspec::series::{koenigs, quadratic_id_recurrence, resolvent_residual, solve_formal, RadiusVerdict, Series};
use compspec::symbols::{conjugate, AnalyticSymbol, Body, Diffeomorphism, Interval};
use compspec::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

const N: usize = 16;

/// `u + m(x − u) + a₂(x − u)² + a₃(x − u)³` with `0 < |m| < 1`.
fn attracting_poly(rng: &mut ChaCha8Rng) -> (Poly, Rational, Rational) {
    let u = small_rational(rng, 3, 2);
    let m = loop {
        let m = small_rational(rng, 5, 6);
        if m != 0 && m.clone().abs() < 1 {
            break m;
        }
    };
    let local = Poly::new(vec![Rational::new(), m.clone(), small_rational(rng, 3, 2), small_rational(rng, 2, 3)]);
    let shifted = local.compose(&Poly::new(vec![Rational::from(-&u), Rational::from(1)]));
    (shifted.add(&Poly::constant(u.clone())), u, m)
}

fn random_lambda(rng: &mut ChaCha8Rng) -> GaussRat {
    loop {
        let re = small_rational(rng, 9, 4);
        let im = if rng.gen_bool(0.25) { small_rational(rng, 3, 2) } else { Rational::new() };
        let l = GaussRat::new(re, im);
        if !l.is_zero() {
            return l;
        }
    }
}

fn exact_coeffs(s: &Series) -> Vec<GaussRat> {
    s.as_exact().expect("exact series").coeffs().to_vec()
}

/// Residual of `f∘φ − λf − γ` for one random instance; `None` when `λ` is resonant.
fn residual_instance(rng: &mut ChaCha8Rng) -> Option<bool> {
    let (p, u, _) = attracting_poly(rng);
    let phi = AnalyticSymbol::polynomial(p, Interval::real_line()).unwrap();
    let d = rng.gen_range(0..=4);
    let gamma = Body::Polynomial(common::random_poly(rng, d, 5, 3));
    let lambda = random_lambda(rng);
    let center = Real::Rational(u);
    let sol = match solve_formal(&phi, &center, &lambda, &gamma, N, DEFAULT_PRECISION) {
        Ok(s) => s,
        Err(Error::ResonantEigenvalue(_)) => return None,
        Err(e) => panic!("{phi}, λ = {lambda}: {e}"),
    };
    let f = sol.series.as_exact()?.clone();
    let pj = phi.body().jet(&center, N, DEFAULT_PRECISION);
    let gj = gamma.jet(&center, N, DEFAULT_PRECISION);
    let r = resolvent_residual(&f, pj.as_exact()?, &lambda, gj.as_exact()?).unwrap();
    Some(r.is_zero())
}

#[test]
fn exact_residual_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut done = 0;
    while done < 100 {
        if let Some(ok) = residual_instance(&mut rng) {
            assert!(ok, "instance {done}");
            done += 1;
        }
    }
}

#[test]
fn recurrence_agrees_with_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let phi = sym("-x^2+x");
    let id = body("x");
    let mut done = 0;
    while done < 20 {
        let l = GaussRat::real(small_rational(&mut rng, 12, 5));
        if l.is_zero() || l.is_one() {
            continue;
        }
        let sol = solve_formal(&phi, &Real::from_int(0), &l, &id, 24, DEFAULT_PRECISION).unwrap();
        assert_eq!(exact_coeffs(&sol.series), quadratic_id_recurrence(&l, 24).unwrap(), "λ = {l}");
        done += 1;
    }
}

fn factorial(n: usize) -> Integer {
    Integer::from(Integer::factorial(n as u32))
}

#[test]
fn parabolic_coefficients_at_two() {
    let sol = solve_formal(&sym("-x^2+x"), &Real::from_int(0), &g("2"), &body("x"), 40, DEFAULT_PRECISION).unwrap();
    let f = exact_coeffs(&sol.series);
    let head: Vec<GaussRat> = [0, -1, 1, -2, 7, -34].iter().map(|&v| GaussRat::from_int(v)).collect();
    assert_eq!(&f[..6], &head[..]);
    for (n, c) in f.iter().enumerate().skip(2) {
        // |1 − λ| = 1
        assert!(c.re.clone().abs() >= factorial(n - 1), "n = {n}");
    }
    assert!(matches!(sol.radius, RadiusVerdict::Diverges { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn signs_alternate_above_one(num in 11i64..=80, den in 1i64..=10) {
        let l = q(num, den);
        prop_assume!(l > 1);
        let f = quadratic_id_recurrence(&GaussRat::real(l.clone()), 40).unwrap();
        for (n, c) in f.iter().enumerate().skip(1) {
            let signed = if n % 2 == 0 { c.re.clone() } else { -c.re.clone() };
            prop_assert!(signed > 0, "λ = {}, n = {}", l, n);
        }
    }
}

/// `σ_ψ(y) = σ_φ(δ(y))/s` for `ψ = δ⁻¹∘φ∘δ` and `δ(y) = sy + t`, so the
/// coefficient `k` picks up a factor `s^{k−1}`.
#[test]
fn koenigs_follows_affine_conjugation() {
    let order = 12;
    for text in ["x/2-x^2", "x/3+x^3", "-x/2+x^2/4"] {
        let phi = sym(text);
        let base = exact_coeffs(&koenigs(&phi, &Real::from_int(0), order, DEFAULT_PRECISION).unwrap());
        for (s, t) in [(q(2, 1), q(1, 1)), (q(-1, 3), q(1, 2)), (q(5, 2), q(-3, 1))] {
            let delta = Diffeomorphism::affine(s.clone(), t.clone()).unwrap();
            let psi = conjugate(&phi, &delta).unwrap();
            let y0 = Real::Rational(Rational::from(-&t) / &s);
            let got = exact_coeffs(&koenigs(&psi, &y0, order, DEFAULT_PRECISION).unwrap());
            for (k, c) in base.iter().enumerate() {
                let want = if k == 0 { GaussRat::zero() } else { c.scale(&rpow(&s, k as u32 - 1)) };
                assert_eq!(got[k], want, "{text}, k = {k}, s = {s}");
            }
        }
    }
}
