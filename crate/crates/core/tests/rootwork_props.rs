mod common;

use common::{q, random_poly, small_rational};
use compspec::poly::{Poly, RealRoot};
use compspec::num::Tri;
use compspec::rootwork::{find_fixed_points, find_fixed_points_second_iterate, is_diffeomorphism, same_point};
use compspec::symbols::{conjugate, AnalyticSymbol, Diffeomorphism, Interval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

fn line(p: Poly) -> AnalyticSymbol {
    AnalyticSymbol::polynomial(p, Interval::real_line()).unwrap()
}

fn nonconstant(rng: &mut ChaCha8Rng, max_degree: usize) -> Poly {
    loop {
        let d = rng.gen_range(1..=max_degree);
        let p = random_poly(rng, d, 6, 4);
        if !p.is_constant() && p != Poly::x() {
            return p;
        }
    }
}

#[test]
fn sturm_count_matches_isolated_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let bound = Rational::from((1, 10u64.pow(15))).square();
    for _ in 0..200 {
        let p = nonconstant(&mut rng, 8);
        let diff = p.sub(&Poly::x());
        let count = diff.sturm().count_open(None, None);
        let points = find_fixed_points(&line(p.clone()));
        assert!(points.is_exhaustive());
        assert_eq!(points.points().len(), count, "{p:?}");
        let roots = diff.real_roots(None, None);
        assert_eq!(roots.len(), count);
        for r in roots {
            match r {
                RealRoot::Rational(x) => assert_eq!(diff.eval(&x), 0),
                RealRoot::Algebraic(a) => {
                    let fine = a.refined(110);
                    assert!(fine.width() < bound);
                    assert!(fine.certificate_holds());
                }
            }
        }
    }
}

#[test]
fn fixed_points_are_fixed_by_the_second_iterate() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..60 {
        let phi = line(nonconstant(&mut rng, 4));
        let first = find_fixed_points(&phi);
        let second = find_fixed_points_second_iterate(&phi).unwrap();
        if second.is_all() {
            // φ∘φ = id, so every point is fixed
            continue;
        }
        for p in first.points() {
            assert!(
                second.points().iter().any(|s| same_point(&s.location, &p.location)),
                "{phi}: {} missing",
                p.location
            );
        }
    }
}

#[test]
fn multipliers_survive_affine_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..60 {
        let phi = line(nonconstant(&mut rng, 4));
        let mut s = small_rational(&mut rng, 4, 3);
        if s == 0 {
            s = q(-1, 2);
        }
        let t = small_rational(&mut rng, 4, 3);
        let delta = Diffeomorphism::affine(s.clone(), t.clone()).unwrap();
        let psi = conjugate(&phi, &delta).unwrap();
        let (a, b) = (find_fixed_points(&phi), find_fixed_points(&psi));
        assert_eq!(a.points().len(), b.points().len(), "{phi}");
        // δ⁻¹(u) = (u − t)/s
        let inv_s = Rational::from(1) / &s;
        let inv_t = Rational::from(-&t) / &s;
        for p in a.points() {
            let moved = p.location.affine(&inv_s, &inv_t);
            let image = b
                .points()
                .iter()
                .find(|r| same_point(&r.location, &moved))
                .unwrap_or_else(|| panic!("{phi}: no image of {}", p.location));
            assert!(same_point(&image.multiplier, &p.multiplier), "{phi} at {}", p.location);
            assert_eq!(image.kind, p.kind);
        }
        if is_diffeomorphism(&phi).verdict == Tri::Yes {
            assert_eq!(is_diffeomorphism(&psi).verdict, Tri::Yes);
        }
    }
}
