use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use super::extend::{eval_value, gamma_value};
use super::{FValue, GlobalSolution};
use crate::error::{Error, Result};
use crate::num::{fmt_rational, rpow, GaussRat};
use crate::symbols::{fmt_float, Value};

fn check_mu(mu: &Rational) -> Result<()> {
    if *mu <= 2 {
        return Err(Error::InvalidParameter(format!("preimage orbits need μ > 2, got {}", fmt_rational(mu))));
    }
    Ok(())
}

/// `x₁ = 1`, `xₙ = 2xₙ₋₁/(μ + √(μ² − 4xₙ₋₁))`: successive preimages of `1` under
/// `−x² + μx` on the branch through the origin, so `φ^[n](xₙ) = μ − 1`.
pub fn preimage_orbit(mu: &Rational, n: usize, prec: u32) -> Result<Vec<Float>> {
    check_mu(mu)?;
    if n == 0 {
        return Err(Error::InvalidParameter("orbit length must be at least 1".into()));
    }
    let mu_f = Float::with_val(prec, mu);
    let mu_sq = Float::with_val(prec, &mu_f * &mu_f);
    let mut out = vec![Float::with_val(prec, 1)];
    for _ in 1..n {
        let prev = out.last().expect("nonempty");
        let disc = Float::with_val(prec, &mu_sq - Float::with_val(prec, prev * 4u32));
        let den = Float::with_val(prec, disc.sqrt() + &mu_f);
        out.push(Float::with_val(prec, prev * 2u32) / den);
    }
    Ok(out)
}

/// `φ^[n](x)` for `φ(x) = −x² + μx`.
pub fn quadratic_iterate(mu: &Rational, x: &Float, n: usize) -> Float {
    let prec = x.prec();
    let mut cur = x.clone();
    for _ in 0..n {
        let t = Float::with_val(prec, mu - Float::with_val(prec, &cur));
        cur = Float::with_val(prec, &cur * &t);
    }
    cur
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub n: usize,
    pub x: Value,
    /// `xₙ/xₙ₋₁`, absent for the first row.
    pub ratio: Option<Value>,
    /// `|φ^[n](xₙ) − (μ − 1)|`.
    pub forward_error: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTable {
    #[serde(with = "crate::num::rational_string")]
    pub mu: Rational,
    pub precision: u32,
    pub rows: Vec<OrbitRow>,
    pub decreasing: bool,
    /// Every ratio is below `2/μ`.
    pub ratio_bound_holds: bool,
}

pub fn orbit_table(mu: &Rational, n: usize, prec: u32) -> Result<OrbitTable> {
    let xs = preimage_orbit(mu, n, prec)?;
    let target = Float::with_val(prec, Rational::from(mu - 1u32));
    let bound = Float::with_val(prec, Rational::from(2u32) / mu);
    let mut rows = Vec::with_capacity(n);
    let (mut decreasing, mut ratio_ok) = (true, true);
    for (i, x) in xs.iter().enumerate() {
        let ratio = (i > 0).then(|| Float::with_val(prec, x / &xs[i - 1]));
        if let Some(r) = &ratio {
            decreasing &= *r < 1;
            ratio_ok &= *r < bound;
        }
        let err = Float::with_val(prec, quadratic_iterate(mu, x, i + 1) - &target).abs();
        rows.push(OrbitRow {
            n: i + 1,
            x: Value::Approx(x.clone()),
            ratio: ratio.map(Value::Approx),
            forward_error: Value::Approx(Float::with_val(64, err)),
        });
    }
    Ok(OrbitTable {
        mu: mu.clone(),
        precision: prec,
        rows,
        decreasing,
        ratio_bound_holds: ratio_ok,
    })
}

/// Residual of `γ(μ−1)/(1−λ) = λⁿf(xₙ) + Σ_{j=1}^{n} λ^{j−1}γ(xⱼ)` for a solution
/// of the resolvent equation of `−x² + μx`.
pub fn telescoping_check(sol: &GlobalSolution, mu: &Rational, n: usize, prec: u32) -> Result<FValue> {
    let lambda = sol.lambda();
    if lambda.is_one() {
        return Err(Error::InvalidParameter("λ = 1 leaves f(μ − 1) undetermined".into()));
    }
    let p = Rational::from(mu - 1u32);
    let on_symbol = sol.phi.body().eval_exact(&Rational::from(1)) == Some(p.clone())
        && sol.phi.body().eval_exact(&p) == Some(p.clone());
    if !on_symbol {
        return Err(Error::HypothesisViolation(format!("the symbol is not −x² + {}x", fmt_rational(mu))));
    }
    let wp = prec + 64;
    let xs = preimage_orbit(mu, n, wp)?;
    let one_minus = FValue::Exact(&GaussRat::one() - lambda);
    let lhs = gamma_value(sol, &Value::Exact(p), wp).div(&one_minus)?;
    let lam = FValue::Exact(lambda.clone());
    let last = Value::Approx(xs[n - 1].clone());
    let mut rhs = eval_value(sol, &last, wp)?;
    for x in xs.iter().rev() {
        rhs = lam.mul(&rhs).add(&gamma_value(sol, &Value::Approx(x.clone()), wp));
    }
    Ok(lhs.sub(&rhs).rounded(prec))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    #[serde(with = "crate::num::rational_string")]
    pub mu: Rational,
    pub lambda: GaussRat,
    pub k: u32,
    #[serde(with = "crate::num::rational_string")]
    pub c: Rational,
    pub n: usize,
    /// `γ(x) = x^k·γ₀(x)` with this affine `γ₀`.
    pub gamma0: String,
    /// Largest `|γ₀|` on `[0, 1]`, attained at `0`.
    #[serde(with = "crate::num::rational_string")]
    pub gamma0_max_on_unit: Rational,
    /// `γ(μ−1)/(1−λ)`.
    pub lhs: GaussRat,
    pub gamma_at_one: GaussRat,
    /// `Σ_{j=2}^{n} λ^{j−1}γ(xⱼ)`, with `f(xₙ)` replaced by `f(0) = 0`.
    pub tail: FValue,
    pub tail_abs: Value,
    #[serde(with = "crate::num::rational_string")]
    pub bound: Rational,
    pub tail_within_bound: bool,
    /// `|γ(μ−1)/(1−λ) − γ(1)| − 6c`.
    pub margin: Value,
    pub contradiction: bool,
    pub note: String,
}

/// Evaluates both sides of the telescoped identity at the preimage orbit of `1`
/// for the witness `γ = x^k·γ₀`, assuming a solution with `f(0) = 0`.
pub fn prop45_witness_demo(
    mu: &Rational,
    lambda: &GaussRat,
    k: u32,
    c: &Rational,
    n: usize,
    prec: u32,
) -> Result<WitnessReport> {
    check_mu(mu)?;
    let norm = lambda.norm_sq();
    if lambda.is_zero() || norm > 1 {
        return Err(Error::InvalidParameter(format!("need 0 < |λ| ≤ 1, got λ = {lambda}")));
    }
    if lambda.is_one() {
        return Err(Error::InvalidParameter("λ = 1 makes γ(μ−1)/(1−λ) undefined".into()));
    }
    if *c <= 0 || *c >= Rational::from((1, 6)) {
        return Err(Error::InvalidParameter(format!("need 0 < c < 1/6, got c = {}", fmt_rational(c))));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("exponent k must be positive".into()));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("depth n must be at least 2".into()));
    }
    let p = Rational::from(mu - 1u32);
    let denom = Rational::from(mu - 2u32);
    let gamma0 = |x: &Rational| Rational::from(&p - x) / &denom;
    let gamma_exact = |x: &Rational| rpow(x, k) * gamma0(x);
    let lhs = GaussRat::real(gamma_exact(&p)).div(&(&GaussRat::one() - lambda))?;
    let gamma_at_one = GaussRat::real(gamma_exact(&Rational::from(1)));

    let wp = prec + 64;
    let xs = preimage_orbit(mu, n, wp)?;
    let lam = lambda.to_complex(wp);
    let mut tail = Complex::new(wp);
    let mut lam_pow = lam.clone();
    for x in &xs[1..] {
        let g0 = Float::with_val(wp, &p - x) / Float::with_val(wp, &denom);
        let g = Float::with_val(wp, x.clone().pow(k) * g0);
        tail += Complex::with_val(wp, &lam_pow * &g);
        lam_pow = Complex::with_val(wp, &lam_pow * &lam);
    }
    let tail_abs = Float::with_val(wp, tail.abs_ref());
    let bound = Rational::from(c * 6u32);
    let tail_within_bound = tail_abs <= Float::with_val(wp, &bound);
    let gap = &lhs - &gamma_at_one;
    let gap_abs = Float::with_val(wp, &gap.norm_sq()).sqrt();
    let margin = Float::with_val(prec, gap_abs - Float::with_val(wp, &bound));
    let margin_value = if gap.is_real() {
        Value::Exact(Rational::from(gap.re.abs_ref()) - &bound)
    } else {
        Value::Approx(margin.clone())
    };
    Ok(WitnessReport {
        mu: mu.clone(),
        lambda: lambda.clone(),
        k,
        c: c.clone(),
        n,
        gamma0: if denom == 1 {
            format!("({} − x)", fmt_rational(&p))
        } else {
            format!("({} − x)/{}", fmt_rational(&p), fmt_rational(&denom))
        },
        gamma0_max_on_unit: Rational::from(&p / &denom),
        lhs,
        gamma_at_one,
        tail: FValue::Approx(Complex::with_val(prec, tail)),
        tail_abs: Value::Approx(Float::with_val(prec, tail_abs)),
        bound,
        tail_within_bound,
        contradiction: margin > 0 && tail_within_bound,
        margin: margin_value,
        note: format!(
            "numerical demonstration at depth {n}, not a proof; γ₀ is affine with γ₀(μ − 1) = 0 and γ₀(1) = 1, so the bounds on γ₀ over [0, 1] hold only weakly at 1; margin {}",
            fmt_float(&margin, 12)
        ),
    })
}
