mod common;

use common::{q, sym, CATALOG};
use compspec::num::{GaussRat, Tri};
use compspec::rootwork::analyze;
use compspec::symbols::{conjugate, parse_symbol, Diffeomorphism, Interval};
use compspec::taxonomy::spectrum;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn probes() -> Vec<GaussRat> {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let mut out: Vec<GaussRat> = ["0", "1", "-1", "2", "1/2", "1/4", "1/8", "4", "-2", "16", "i", "1/2+1/2i", "3"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    while out.len() < 64 {
        let re = q(rng.gen_range(-12..=12), rng.gen_range(1..=4));
        let im = if rng.gen_bool(0.3) { q(rng.gen_range(-4..=4), rng.gen_range(1..=4)) } else { q(0, 1) };
        out.push(GaussRat::new(re, im));
    }
    out
}

fn affine_deltas() -> Vec<Diffeomorphism> {
    [(q(2, 1), q(1, 1)), (q(-1, 1), q(0, 1)), (q(1, 3), q(-1, 2))]
        .into_iter()
        .map(|(s, t)| Diffeomorphism::affine(s, t).unwrap())
        .collect()
}

#[test]
fn reports_survive_affine_conjugation() {
    for text in CATALOG {
        let phi = sym(text);
        let base = spectrum(&phi).comparable_json();
        for delta in affine_deltas() {
            let psi = conjugate(&phi, &delta).unwrap();
            assert_eq!(spectrum(&psi).comparable_json(), base, "{text} under {:?}", delta.as_affine());
        }
    }
}

#[test]
fn sinh_conjugates_share_reports() {
    let delta = Diffeomorphism::parse("exp(x)-exp(-x)", Interval::real_line()).unwrap();
    for text in ["x^2", "x^3", "-x", "x/2"] {
        let phi = sym(text);
        let psi = conjugate(&phi, &delta).unwrap();
        let (a, b) = (spectrum(&phi), spectrum(&psi));
        assert_eq!(a.comparable_json(), b.comparable_json(), "{text}");
        assert!(!b.certified, "{text}");
    }
}

#[test]
fn point_spectrum_lies_in_spectrum() {
    let probes = probes();
    for text in CATALOG {
        let phi = sym(text);
        let r = spectrum(&phi);
        for l in &probes {
            if r.sigma_p.contains(l) == Tri::Yes {
                assert_ne!(r.sigma.contains(l), Tri::No, "{text}: {l} in σ_p but not σ");
            }
        }
        let zero = r.sigma.contains(&GaussRat::zero());
        match analyze(&phi).unwrap().is_diffeo.verdict {
            Tri::Yes => assert_eq!(zero, Tri::No, "{text}"),
            Tri::No => assert_eq!(zero, Tri::Yes, "{text}"),
            Tri::Unknown => {}
        }
    }
}

#[test]
fn inverse_symbol_inverts_the_spectrum() {
    let pairs = [("x/2", "2*x"), ("x+1", "x-1"), ("-x", "-x"), ("2*x+3", "(x-3)/2"), ("x", "x"), ("-3*x", "-x/3")];
    for (a, b) in pairs {
        let (ra, rb) = (spectrum(&sym(a)), spectrum(&sym(b)));
        for l in probes().iter().filter(|l| !l.is_zero()) {
            let inv = l.recip().unwrap();
            assert_eq!(ra.sigma.contains(l), rb.sigma.contains(&inv), "σ: {a} at {l} vs {b} at {inv}");
            assert_eq!(ra.sigma_p.contains(l), rb.sigma_p.contains(&inv), "σ_p: {a} at {l} vs {b} at {inv}");
        }
    }
}

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("x".to_string()),
        (-5i64..=5, 1i64..=3).prop_map(|(n, d)| format!("({n}/{d})")),
    ]
}

fn expression() -> impl Strategy<Value = String> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})+({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), 2u32..=3).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.clone().prop_map(|a| format!("arctan({a})")),
            inner.clone().prop_map(|a| format!("exp(({a})/4)")),
            inner.prop_map(|a| format!("sin({a})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classification_is_total(text in expression()) {
        if let Ok(phi) = parse_symbol(&text, Interval::real_line()) {
            let r = spectrum(&phi);
            prop_assert!(!r.case.is_empty());
        }
    }
}
