use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use super::radius::{estimate_radius, RadiusVerdict};
use super::truncated::{ExactSeries, FloatSeries, Series, TruncatedSeries};
use crate::error::{Error, Result};
use crate::num::{GaussRat, Real, Scalar, Tri};
use crate::symbols::{AnalyticSymbol, Body};

/// Truncated formal solution of `f(φ(x)) − λf(x) = γ(x)` at a fixed point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSolution {
    pub series: Series,
    pub lambda: GaussRat,
    pub multiplier: Real,
    /// Right-hand side as entered.
    pub gamma: String,
    /// Orders `n` with `λ = mⁿ`; the solver refuses these, so a returned solution has none.
    pub resonances: Vec<usize>,
    pub radius: RadiusVerdict,
}

impl LocalSolution {
    pub fn center(&self) -> &Real {
        self.series.center()
    }
}

/// `t⁰, t¹, …, t^N` for `t = φ(x) − u`, each truncated at order `N`.
fn shift_powers<T: Scalar>(phi_jet: &TruncatedSeries<T>) -> Vec<TruncatedSeries<T>> {
    let mut coeffs = phi_jet.coeffs().to_vec();
    coeffs[0] = coeffs[0].zero_like();
    let t = TruncatedSeries::new(phi_jet.center().clone(), coeffs);
    let mut out = vec![t.constant_like(t.coeff(0).one_like())];
    for _ in 0..phi_jet.order() {
        let next = out.last().expect("nonempty").mul(&t);
        out.push(next);
    }
    out
}

/// Triangular solve of `Σ_{j ≤ n} f_j [hⁿ]t^j − λ f_n = γ_n`. With `pinned = Some((k, v))`
/// the coefficient `k` is set to `v` and its equation is skipped (homogeneous Schröder case).
fn triangular<T: Scalar>(
    powers: &[TruncatedSeries<T>],
    lambda: &T,
    gamma: &[T],
    pinned: Option<(usize, T)>,
    is_resonant: impl Fn(&T, usize) -> bool,
) -> Result<Vec<T>> {
    let n_max = gamma.len() - 1;
    let mut f: Vec<T> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if let Some((k, v)) = &pinned {
            if *k == n {
                f.push(v.clone());
                continue;
            }
        }
        let mut rhs = gamma[n].clone();
        for (j, fj) in f.iter().enumerate() {
            if !fj.is_zero() {
                rhs = rhs.sub(&fj.mul(powers[j].coeff(n)));
            }
        }
        let mn = powers[n].coeff(n);
        let denom = mn.sub(lambda);
        if is_resonant(&denom, n) {
            if pinned.is_some() && rhs.is_zero() {
                f.push(rhs.zero_like());
                continue;
            }
            return Err(Error::ResonantEigenvalue(n));
        }
        f.push(rhs.div(&denom)?);
    }
    Ok(f)
}

fn exact_resonance(d: &GaussRat, _n: usize) -> bool {
    d.is_zero()
}

fn float_resonance(prec: u32) -> impl Fn(&Complex, usize) -> bool {
    move |d: &Complex, _n| {
        let a = Float::with_val(prec, d.abs_ref());
        a < (Float::with_val(prec, 1) >> (prec / 2))
    }
}

fn check_fixed(phi: &AnalyticSymbol, u: &Real, prec: u32) -> Result<()> {
    if let Some(r) = u.as_rational() {
        if !phi.domain().contains(r) {
            return Err(Error::Domain(format!("{u} is outside {}", phi.domain())));
        }
        if let Some(v) = phi.body().eval_exact(r) {
            return if v == *r {
                Ok(())
            } else {
                Err(Error::HypothesisViolation(format!("φ({u}) ≠ {u}")))
            };
        }
    }
    let x = u.to_float(prec);
    let d = Float::with_val(prec, phi.body().eval_float(&x) - &x).abs();
    if d > (Float::with_val(prec, 1) >> (prec / 2)) {
        return Err(Error::HypothesisViolation(format!("φ({u}) ≠ {u}")));
    }
    Ok(())
}

fn multiplier_of(jet: &Series, prec: u32) -> Real {
    match jet {
        Series::Exact(s) if jet.order() >= 1 => Real::Rational(s.coeff(1).re.clone()),
        _ => Real::approx(&jet.coeff_float(1, prec)),
    }
}

fn float_jet(s: &Series, prec: u32) -> FloatSeries {
    s.to_float_series(prec)
}

/// Solves `f(φ(x)) − λf(x) = c·γ(x)` through `order` at the fixed point `u`.
pub fn solve_formal_scaled(
    phi: &AnalyticSymbol,
    u: &Real,
    lambda: &GaussRat,
    gamma: &Body,
    scale: &GaussRat,
    order: usize,
    prec: u32,
) -> Result<LocalSolution> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    check_fixed(phi, u, prec)?;
    let pj = phi.body().jet(u, order, prec);
    let gj = gamma.jet(u, order, prec);
    let multiplier = multiplier_of(&pj, prec);
    let series = match (&pj, &gj) {
        (Series::Exact(p), Series::Exact(g)) => {
            let powers = shift_powers(p);
            let rhs: Vec<GaussRat> = g.coeffs().iter().map(|c| c * scale).collect();
            let f = triangular(&powers, lambda, &rhs, None, exact_resonance)?;
            Series::Exact(ExactSeries::new(u.clone(), f))
        }
        _ => {
            let p = float_jet(&pj, prec);
            let g = float_jet(&gj, prec);
            let powers = shift_powers(&p);
            let l = lambda.to_complex(prec);
            let c = scale.to_complex(prec);
            let rhs: Vec<Complex> = g.coeffs().iter().map(|x| Complex::with_val(prec, x * &c)).collect();
            let f = triangular(&powers, &l, &rhs, None, float_resonance(prec))?;
            Series::Float(FloatSeries::new(u.clone(), f))
        }
    };
    let radius = estimate_radius(&series);
    Ok(LocalSolution {
        series,
        lambda: lambda.clone(),
        multiplier,
        gamma: gamma.to_string(),
        resonances: Vec::new(),
        radius,
    })
}

/// Unique truncated solution of `f(φ(x)) − λf(x) = γ(x)` at the fixed point `u`.
pub fn solve_formal(
    phi: &AnalyticSymbol,
    u: &Real,
    lambda: &GaussRat,
    gamma: &Body,
    order: usize,
    prec: u32,
) -> Result<LocalSolution> {
    solve_formal_scaled(phi, u, lambda, gamma, &GaussRat::one(), order, prec)
}

/// Coefficients of `f∘φ − λf − γ`, all zero for an exact solution.
pub fn resolvent_residual<T: Scalar>(
    f: &TruncatedSeries<T>,
    phi_jet: &TruncatedSeries<T>,
    lambda: &T,
    gamma_jet: &TruncatedSeries<T>,
) -> Result<TruncatedSeries<T>> {
    Ok(f.compose(phi_jet)?.sub(&f.scale(lambda)).sub(gamma_jet))
}

/// The explicit recurrence for `φ = −x² + x`, `γ = x`:
/// `f₀ = 0`, `f₁ = 1/(1−λ)`, `fₙ = (1/(1−λ)) Σ_{j=1}^{⌊n/2⌋} C(n−j, j)(−1)^{j−1} f_{n−j}`.
pub fn quadratic_id_recurrence(lambda: &GaussRat, order: usize) -> Result<Vec<GaussRat>> {
    if lambda.is_one() {
        return Err(Error::InvalidParameter("λ = 1 makes 1 − λ vanish".into()));
    }
    let inv = (&GaussRat::one() - lambda).recip()?;
    let mut f = vec![GaussRat::zero()];
    if order >= 1 {
        f.push(inv.clone());
    }
    for n in 2..=order {
        let mut acc = GaussRat::zero();
        for j in 1..=n / 2 {
            let c = Integer::from(Integer::binomial_u((n - j) as u32, j as u32));
            let term = f[n - j].scale(&Rational::from(c));
            acc = if j % 2 == 1 { &acc + &term } else { &acc - &term };
        }
        f.push(&acc * &inv);
    }
    Ok(f)
}

/// Entry `n` is true when `λ ≠ mⁿ` is proven, for `0 ≤ n ≤ order`.
pub fn smajdor_condition(lambda: &GaussRat, m: &Real, order: usize) -> Result<Vec<bool>> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    Ok((0..=order).map(|n| m.pow_equals(n as u32, lambda) == Tri::No).collect())
}

fn attracting_multiplier(jet: &Series, prec: u32) -> Result<Real> {
    let m = multiplier_of(jet, prec);
    let zero = m.sign() == Some(std::cmp::Ordering::Equal);
    if zero || m.abs_cmp_one() != Some(std::cmp::Ordering::Less) {
        return Err(Error::NeutralOrSuperattracting(format!(
            "Koenigs linearization needs 0 < |m| < 1, got m = {m}"
        )));
    }
    Ok(m)
}

/// Koenigs function `σ` with `σ(u) = 0`, `σ'(u) = 1`, `σ∘φ = m·σ`, through `order`.
pub fn koenigs(phi: &AnalyticSymbol, u: &Real, order: usize, prec: u32) -> Result<Series> {
    check_fixed(phi, u, prec)?;
    let order = order.max(1);
    let pj = phi.body().jet(u, order, prec);
    attracting_multiplier(&pj, prec)?;
    Ok(match &pj {
        Series::Exact(p) => {
            let powers = shift_powers(p);
            let m = p.coeff(1).clone();
            let zero = vec![GaussRat::zero(); order + 1];
            let f = triangular(&powers, &m, &zero, Some((1, GaussRat::one())), exact_resonance)?;
            Series::Exact(ExactSeries::new(u.clone(), f))
        }
        Series::Float(p) => {
            let powers = shift_powers(p);
            let m = p.coeff(1).clone();
            let zero = vec![Complex::new(prec); order + 1];
            let one = Complex::with_val(prec, 1);
            let f = triangular(&powers, &m, &zero, Some((1, one)), float_resonance(prec))?;
            Series::Float(FloatSeries::new(u.clone(), f))
        }
    })
}

/// `σⁿ`, an eigenfunction for the eigenvalue `mⁿ`.
pub fn eigenfunction(phi: &AnalyticSymbol, u: &Real, n: usize, order: usize, prec: u32) -> Result<Series> {
    Ok(match koenigs(phi, u, order, prec)? {
        Series::Exact(s) => Series::Exact(s.pow(n).truncate(order)),
        Series::Float(s) => Series::Float(s.pow(n).truncate(order)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::DEFAULT_PRECISION;
    use crate::symbols::{parse_symbol, Interval};

    fn g(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    fn body(s: &str) -> Body {
        Body::from_expr(crate::symbols::parse_expr(s).unwrap())
    }

    fn sym(s: &str) -> AnalyticSymbol {
        parse_symbol(s, Interval::real_line()).unwrap()
    }

    fn exact(s: &Series) -> Vec<GaussRat> {
        s.as_exact().unwrap().coeffs().to_vec()
    }

    #[test]
    fn linear_contraction_solution() {
        let sol = solve_formal(&sym("x/2"), &Real::from_int(0), &g("5"), &body("1+x^2"), 2, DEFAULT_PRECISION).unwrap();
        assert_eq!(exact(&sol.series), vec![g("-1/4"), g("0"), g("-4/19")]);
        let err = solve_formal(&sym("x/2"), &Real::from_int(0), &g("1/4"), &body("x^2"), 4, DEFAULT_PRECISION);
        assert_eq!(err.unwrap_err(), Error::ResonantEigenvalue(2));
        let err = solve_formal(&sym("x/2"), &Real::from_int(0), &g("0"), &body("x^2"), 4, DEFAULT_PRECISION);
        assert_eq!(err.unwrap_err(), Error::ZeroLambda);
    }

    #[test]
    fn parabolic_solution_matches_recurrence() {
        let sol = solve_formal(&sym("-x^2+x"), &Real::from_int(0), &g("2"), &body("x"), 3, DEFAULT_PRECISION).unwrap();
        assert_eq!(exact(&sol.series), vec![g("0"), g("-1"), g("1"), g("-2")]);
        let rec = quadratic_id_recurrence(&g("2"), 5).unwrap();
        let want: Vec<GaussRat> = [0, -1, 1, -2, 7, -34].iter().map(|&v| GaussRat::from_int(v)).collect();
        assert_eq!(rec, want);
        let rec = quadratic_id_recurrence(&g("-1"), 2).unwrap();
        assert_eq!(rec[1], g("1/2"));
        assert_eq!(rec[2], g("1/4"));
        assert!(quadratic_id_recurrence(&g("1"), 3).is_err());
    }

    #[test]
    fn smajdor_entries() {
        let half = Real::Rational(Rational::from((1, 2)));
        let v = smajdor_condition(&g("1/8"), &half, 5).unwrap();
        assert_eq!(v, vec![true, true, true, false, true, true]);
        assert!(smajdor_condition(&g("2"), &Real::from_int(1), 6).unwrap().iter().all(|b| *b));
        assert_eq!(smajdor_condition(&g("1"), &half, 2).unwrap()[0], false);
    }

    #[test]
    fn koenigs_examples() {
        let s = koenigs(&sym("x/2"), &Real::from_int(0), 6, DEFAULT_PRECISION).unwrap();
        let mut want = vec![GaussRat::zero(); 7];
        want[1] = GaussRat::one();
        assert_eq!(exact(&s), want);
        let s = koenigs(&sym("x/2-x^2"), &Real::from_int(0), 4, DEFAULT_PRECISION).unwrap();
        assert_eq!(exact(&s)[2], g("-4"));
        let phi = sym("1/2*arctan(x)");
        let u = Real::from_int(0);
        let s = koenigs(&phi, &u, 20, DEFAULT_PRECISION).unwrap();
        let sigma = s.as_exact().unwrap();
        let pj = phi.body().jet(&u, 20, DEFAULT_PRECISION);
        let pj = pj.as_exact().unwrap();
        let zero = sigma.zero_like();
        let r = resolvent_residual(sigma, pj, &g("1/2"), &zero).unwrap();
        assert!(r.is_zero());
        for n in 0..4 {
            let e = eigenfunction(&phi, &u, n, 20, DEFAULT_PRECISION).unwrap();
            let e = e.as_exact().unwrap();
            let lam = g("1/2").pow(n as i64).unwrap();
            assert!(resolvent_residual(e, pj, &lam, &zero).unwrap().is_zero(), "n = {n}");
        }
        assert!(matches!(
            koenigs(&sym("-x^2+x"), &u, 4, DEFAULT_PRECISION),
            Err(Error::NeutralOrSuperattracting(_))
        ));
        assert!(matches!(
            koenigs(&sym("x^2"), &u, 4, DEFAULT_PRECISION),
            Err(Error::NeutralOrSuperattracting(_))
        ));
    }

    #[test]
    fn float_path_for_irrational_fixed_point() {
        // the fixed point of arctan(x)/2 + 1 is irrational
        let phi = sym("1/2*arctan(x) + 1");
        let u = {
            let a = crate::rootwork::analyze(&phi).unwrap();
            a.fixed_points.points()[0].location.clone()
        };
        let sol = solve_formal(&phi, &u, &g("3"), &body("1"), 6, DEFAULT_PRECISION).unwrap();
        assert!(!sol.series.is_exact());
        let f = sol.series.to_float_series(DEFAULT_PRECISION);
        let pj = phi.body().jet(&u, 6, DEFAULT_PRECISION).to_float_series(DEFAULT_PRECISION);
        let gj = f.constant_like(Complex::with_val(DEFAULT_PRECISION, 1));
        let l = Complex::with_val(DEFAULT_PRECISION, 3);
        let r = resolvent_residual(&f, &pj, &l, &gj).unwrap();
        for c in r.coeffs() {
            assert!(Float::with_val(64, c.abs_ref()) < 1e-60);
        }
    }
}
