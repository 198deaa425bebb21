use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use super::truncated::Series;
use crate::num::{rpow, simplest_between};

/// Smallest order for which a verdict is attempted.
pub const MIN_ORDER: usize = 16;

/// Exactly verified bound `|fₙ| ≥ (n−1)!·cⁿ` for `from ≤ n ≤ to`, with `c` fitted on
/// earlier orders. Growth that keeps pace with the factorial extrapolation rules out
/// a geometric envelope over the range examined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceCertificate {
    #[serde(with = "crate::num::rational_string")]
    pub c: Rational,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RadiusVerdict {
    /// `r_est` is `None` when the tail coefficients all vanish.
    Converges { r_est: Option<f64> },
    Diverges { certificate: DivergenceCertificate },
    Inconclusive { reason: String },
}

impl RadiusVerdict {
    pub fn r_est(&self) -> Option<f64> {
        match self {
            RadiusVerdict::Converges { r_est } => *r_est,
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RadiusVerdict::Converges { .. } => "converges",
            RadiusVerdict::Diverges { .. } => "diverges",
            RadiusVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln |fₙ|` per coefficient, `None` for zeros.
fn log_abs(series: &Series) -> Vec<Option<f64>> {
    let prec = 128;
    (0..=series.order())
        .map(|k| {
            let sq = match series {
                Series::Exact(s) => Float::with_val(prec, &s.coeff(k).norm_sq()),
                Series::Float(s) => Float::with_val(prec, s.coeff(k).norm_ref()),
            };
            (!sq.is_zero()).then(|| sq.ln().to_f64() / 2.0)
        })
        .collect()
}

fn factorial_certificate(series: &Series, logs: &[Option<f64>]) -> Option<DivergenceCertificate> {
    let s = series.as_exact()?;
    let n = series.order();
    let (fit_lo, from) = (n / 4, n / 2);
    let fit: Vec<f64> = (fit_lo.max(2)..from)
        .filter_map(|k| logs[k].map(|l| ((l - ln_factorial(k - 1)) / k as f64).exp()))
        .collect();
    let c = fit.into_iter().fold(f64::INFINITY, f64::min);
    if !c.is_finite() || c <= 0.0 {
        return None;
    }
    let c = simplest_between(&Rational::from_f64(c * 0.98)?, &Rational::from_f64(c * 0.99)?);
    if c <= 0 {
        return None;
    }
    let mut fact = Integer::from(1);
    for k in 1..from.max(1) {
        fact *= k as u32;
    }
    for k in from.max(1)..=n {
        if k > from.max(1) {
            fact *= (k - 1) as u32;
        }
        let bound = Rational::from(&fact) * rpow(&c, k as u32);
        if s.coeff(k).norm_sq() < Rational::from(&bound * &bound) {
            return None;
        }
    }
    Some(DivergenceCertificate { c, from, to: n })
}

/// Radius verdict from the tail `N/2 ≤ n ≤ N` of the coefficients.
pub fn estimate_radius(series: &Series) -> RadiusVerdict {
    let n = series.order();
    if n < MIN_ORDER {
        return RadiusVerdict::Inconclusive {
            reason: format!("order {n} is below {MIN_ORDER}"),
        };
    }
    let logs = log_abs(series);
    if let Some(certificate) = factorial_certificate(series, &logs) {
        return RadiusVerdict::Diverges { certificate };
    }
    let r: Vec<f64> = (n / 2..=n)
        .filter_map(|k| logs[k].map(|l| (-l / k as f64).exp()))
        .collect();
    let Some(&last) = r.last() else {
        return RadiusVerdict::Converges { r_est: None };
    };
    let hi = r.iter().cloned().fold(f64::MIN, f64::max);
    let lo = r.iter().cloned().fold(f64::MAX, f64::min);
    if lo > 0.0 && (hi - lo) / hi < 0.25 {
        RadiusVerdict::Converges { r_est: Some(last) }
    } else {
        RadiusVerdict::Inconclusive {
            reason: format!("tail root test spread {:.3}..{:.3}", lo, hi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{GaussRat, Real};
    use crate::series::{quadratic_id_recurrence, ExactSeries};

    #[test]
    fn geometric_converges() {
        let s = Series::Exact(ExactSeries::from_rationals(Real::from_int(0), &vec![Rational::from(1); 31]));
        match estimate_radius(&s) {
            RadiusVerdict::Converges { r_est: Some(r) } => assert!((r - 1.0).abs() < 0.1),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn recurrence_diverges() {
        let f = quadratic_id_recurrence(&GaussRat::from_int(2), 30).unwrap();
        let s = Series::Exact(ExactSeries::new(Real::from_int(0), f));
        assert!(matches!(estimate_radius(&s), RadiusVerdict::Diverges { .. }));
    }

    #[test]
    fn short_series_inconclusive() {
        let s = Series::Exact(ExactSeries::from_rationals(Real::from_int(0), &vec![Rational::from(1); 5]));
        assert!(matches!(estimate_radius(&s), RadiusVerdict::Inconclusive { .. }));
    }

    #[test]
    fn koenigs_series_converges() {
        let phi = crate::symbols::parse_symbol("x/2-x^2", crate::symbols::Interval::real_line()).unwrap();
        let s = crate::series::koenigs(&phi, &Real::from_int(0), 30, 256).unwrap();
        match estimate_radius(&s) {
            RadiusVerdict::Converges { r_est: Some(r) } => assert!(r > 0.0),
            v => panic!("{v:?}"),
        }
    }
}
