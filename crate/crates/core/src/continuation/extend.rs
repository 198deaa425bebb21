use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use super::{Branch, FValue, GlobalSolution, Rule, MAX_PRECISION};
use crate::error::{Error, Result};
use crate::num::GaussRat;
use crate::series::Series;
use crate::symbols::Value;

/// Numerator/denominator size beyond which orbit points continue in floating point.
const EXACT_BITS: u32 = 4096;
const GUARD: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Series,
    ForwardOrbit,
    InverseBranch,
    Mirror,
}

/// One link of an evaluation chain: `rule` applied `steps` times starting at `from`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub rule: RuleKind,
    pub from: Value,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub x: Value,
    pub value: FValue,
    /// Total number of functional-equation applications along the chain.
    pub depth: usize,
    pub chain: Vec<Step>,
    /// `f(φ(x)) − λf(x) − γ(x)`, absent when `f(φ(x))` is out of reach.
    pub residual: Option<FValue>,
    pub residual_ok: Option<bool>,
    pub precision: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Dispatch { mirror: bool },
    Forward,
    Inverse,
    Mirror,
}

type Chain = (FValue, Vec<Step>);

fn depth_of(chain: &[Step]) -> usize {
    chain.iter().map(|s| s.steps).sum()
}

/// `2^{-(prec − 32)}`, the residual and agreement tolerance at precision `prec`.
pub fn tolerance(prec: u32) -> Float {
    Float::with_val(64, 1) >> prec.saturating_sub(32)
}

fn too_big(v: &Value) -> bool {
    match v {
        Value::Exact(r) => r.numer().significant_bits() > EXACT_BITS || r.denom().significant_bits() > EXACT_BITS,
        Value::Approx(f) => !f.is_finite() || f.get_exp().is_some_and(|e| e > EXACT_BITS as i32),
    }
}

impl GlobalSolution {
    fn lambda_value(&self) -> FValue {
        FValue::Exact(self.lambda().clone())
    }

    fn series_at(&self, x: &Value, wp: u32) -> FValue {
        let center = self.local.center();
        match (&self.local.series, x, center.as_rational()) {
            (Series::Exact(s), Value::Exact(r), Some(c)) => FValue::Exact(s.eval_offset(&GaussRat::real(r.clone() - c))),
            (series, _, _) => {
                let h = Float::with_val(wp, x.to_float(wp) - center.to_float(wp));
                let fs = series.to_float_series(wp);
                FValue::Approx(fs.eval_offset(&Complex::with_val(wp, h)))
            }
        }
    }

    /// `scale·γ(x)`.
    fn gamma_at(&self, x: &Value, wp: u32) -> FValue {
        let g = FValue::from_point(&self.gamma.eval_value(x, wp));
        g.mul(&FValue::Exact(self.gamma_scale.clone()))
    }

    /// `φ(x)`, or `None` when it leaves `J` or grows without bound.
    fn phi_at(&self, x: &Value, wp: u32) -> Option<Value> {
        let v = match self.phi.body().eval_value(x, wp) {
            v @ Value::Exact(_) if too_big(&v) => Value::Approx(v.to_float(wp)),
            v => v,
        };
        (v.in_interval(self.phi.domain()) && !too_big(&v)).then_some(v)
    }

    fn eval_raw(&self, x: &Value, wp: u32, mode: Mode) -> Result<Chain> {
        match mode {
            Mode::Forward => self.forward(x, wp, self.forward_depth()),
            Mode::Inverse => match self.rules.iter().find(|r| matches!(r, Rule::InverseBranch { .. })) {
                Some(Rule::InverseBranch { branch, max_depth, .. }) => self.inverse(x, wp, branch, *max_depth),
                _ => Err(Error::HypothesisViolation("no inverse-branch rule".into())),
            },
            Mode::Mirror => match self.rules.iter().find(|r| matches!(r, Rule::Mirror { .. })) {
                Some(Rule::Mirror { axis, .. }) => self.mirror(x, wp, axis),
                _ => Err(Error::HypothesisViolation("no mirror rule".into())),
            },
            Mode::Dispatch { mirror } => {
                if x.in_interval(&self.core) {
                    return Ok(self.at_core(x, wp));
                }
                let mut first_err = None;
                for rule in &self.rules {
                    let attempt = match rule {
                        Rule::ForwardOrbit { max_depth } if x.in_interval(self.phi.domain()) => {
                            self.forward(x, wp, *max_depth)
                        }
                        Rule::InverseBranch {
                            branch,
                            region,
                            max_depth,
                        } if x.in_interval(region) => self.inverse(x, wp, branch, *max_depth),
                        Rule::Mirror { axis, region } if mirror && x.in_interval(region) => self.mirror(x, wp, axis),
                        _ => continue,
                    };
                    match attempt {
                        Ok(c) => return Ok(c),
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    }
                }
                Err(first_err.unwrap_or_else(|| Error::Domain(format!("no extension rule covers {x}"))))
            }
        }
    }

    fn forward_depth(&self) -> usize {
        self.rules
            .iter()
            .find_map(|r| match r {
                Rule::ForwardOrbit { max_depth } => Some(*max_depth),
                _ => None,
            })
            .unwrap_or(super::DEFAULT_MAX_DEPTH)
    }

    fn at_core(&self, x: &Value, wp: u32) -> Chain {
        let step = Step {
            rule: RuleKind::Series,
            from: x.clone(),
            steps: 0,
        };
        (self.series_at(x, wp), vec![step])
    }

    /// `f(x) = (f(φ(x)) − γ(x))/λ` unwound from the first orbit point in the core.
    fn forward(&self, x: &Value, wp: u32, max_depth: usize) -> Result<Chain> {
        if !x.in_interval(self.phi.domain()) {
            return Err(Error::Domain(format!("{x} is outside {}", self.phi.domain())));
        }
        let mut orbit = vec![x.clone()];
        loop {
            let cur = orbit.last().expect("nonempty");
            if cur.in_interval(&self.core) {
                break;
            }
            let k = orbit.len() - 1;
            if k >= max_depth {
                return Err(Error::BasinEscape(k));
            }
            match self.phi_at(cur, wp) {
                Some(next) => orbit.push(next),
                None => return Err(Error::BasinEscape(k + 1)),
            }
        }
        let n = orbit.len() - 1;
        let (mut v, mut chain) = self.at_core(&orbit[n], wp);
        let lambda = self.lambda_value();
        for xk in orbit[..n].iter().rev() {
            v = v.sub(&self.gamma_at(xk, wp)).div(&lambda)?;
        }
        if n > 0 {
            chain.insert(
                0,
                Step {
                    rule: RuleKind::ForwardOrbit,
                    from: x.clone(),
                    steps: n,
                },
            );
        }
        Ok((v, chain))
    }

    /// `f(x) = λf(ψ(x)) + γ(ψ(x))` along the ψ-orbit of `x`.
    fn inverse(&self, x: &Value, wp: u32, branch: &Branch, max_depth: usize) -> Result<Chain> {
        let mut orbit = vec![x.clone()];
        loop {
            let cur = orbit.last().expect("nonempty");
            if cur.in_interval(&self.core) {
                break;
            }
            let k = orbit.len() - 1;
            if k >= max_depth {
                return Err(Error::BasinEscape(k));
            }
            let next = branch.apply(cur, wp)?;
            if !next.in_interval(self.phi.domain()) {
                return Err(Error::BasinEscape(k + 1));
            }
            orbit.push(next);
        }
        let n = orbit.len() - 1;
        let (mut v, mut chain) = self.at_core(&orbit[n], wp);
        let lambda = self.lambda_value();
        for yk in orbit[1..].iter().rev() {
            v = lambda.mul(&v).add(&self.gamma_at(yk, wp));
        }
        if n > 0 {
            chain.insert(
                0,
                Step {
                    rule: RuleKind::InverseBranch,
                    from: x.clone(),
                    steps: n,
                },
            );
        }
        Ok((v, chain))
    }

    /// `f(y) = f(2a − y) + (γ(2a − y) − γ(y))/λ`.
    fn mirror(&self, y: &Value, wp: u32, axis: &Rational) -> Result<Chain> {
        let reflected = match y {
            Value::Exact(r) => Value::Exact(Rational::from(axis * 2u32) - r),
            Value::Approx(f) => Value::Approx(Float::with_val(wp, Rational::from(axis * 2u32)) - f),
        };
        let (fr, mut chain) = self
            .eval_raw(&reflected, wp, Mode::Dispatch { mirror: false })
            .map_err(|e| Error::ReflectedUncovered(format!("{reflected}: {e}")))?;
        let correction = self
            .gamma_at(&reflected, wp)
            .sub(&self.gamma_at(y, wp))
            .div(&self.lambda_value())?;
        chain.insert(
            0,
            Step {
                rule: RuleKind::Mirror,
                from: y.clone(),
                steps: 1,
            },
        );
        Ok((fr.add(&correction), chain))
    }

    fn residual_at(&self, x: &Value, v: &FValue, wp: u32) -> Option<FValue> {
        let fx_phi = self
            .phi_at(x, wp)
            .and_then(|p| self.eval_raw(&p, wp, Mode::Dispatch { mirror: true }).ok())?;
        Some(fx_phi.0.sub(&self.lambda_value().mul(v)).sub(&self.gamma_at(x, wp)))
    }

    /// Evaluates in `mode`, doubling the working precision until two consecutive
    /// precisions agree to `2^{-(prec−32)}`.
    fn evaluate_mode(&self, x: &Value, prec: u32, mode: Mode) -> Result<Evaluation> {
        let mut base = prec.max(32);
        let mut lower = self.eval_raw(x, base + GUARD, mode)?;
        let (chosen, wp) = loop {
            if lower.0.is_exact() {
                break (lower, base + GUARD);
            }
            let wp = 2 * base + GUARD;
            let upper = self.eval_raw(x, wp, mode)?;
            let scale = upper.0.abs(wp).max(&Float::with_val(wp, 1));
            let diff = lower.0.sub(&upper.0).abs(wp);
            if diff <= Float::with_val(wp, &scale * tolerance(prec)) {
                break (upper, wp);
            }
            base *= 2;
            if base > MAX_PRECISION {
                return Err(Error::PrecisionLoss(format!(
                    "values at {} and {wp} bits differ by {}",
                    wp / 2,
                    crate::symbols::fmt_float(&diff, 6)
                )));
            }
            lower = upper;
        };
        let (value, chain) = chosen;
        let residual = self.residual_at(x, &value, wp);
        let residual_ok = residual.as_ref().map(|r| {
            let scale = [
                Float::with_val(wp, 1),
                self.lambda_value().mul(&value).abs(wp),
                self.gamma_at(x, wp).abs(wp),
            ]
            .into_iter()
            .fold(Float::with_val(wp, 0), |a, b| a.max(&b));
            r.abs(wp) <= Float::with_val(wp, scale * tolerance(prec))
        });
        Ok(Evaluation {
            x: x.clone(),
            depth: depth_of(&chain),
            value: value.rounded(prec),
            chain,
            residual: residual.map(|r| r.rounded(prec)),
            residual_ok,
            precision: prec,
        })
    }
}

/// Value of the global solution at `x`: the core series, else the first rule that succeeds.
pub fn evaluate(sol: &GlobalSolution, x: &Value, prec: u32) -> Result<Evaluation> {
    sol.evaluate_mode(x, prec, Mode::Dispatch { mirror: true })
}

/// Forward-orbit extension; depth 0 when `x` already lies in the core.
pub fn extend_forward(sol: &GlobalSolution, x: &Value, prec: u32) -> Result<Evaluation> {
    sol.evaluate_mode(x, prec, Mode::Forward)
}

pub fn extend_inverse_branch(sol: &GlobalSolution, x: &Value, prec: u32) -> Result<Evaluation> {
    sol.evaluate_mode(x, prec, Mode::Inverse)
}

pub fn extend_mirror(sol: &GlobalSolution, y: &Value, prec: u32) -> Result<Evaluation> {
    sol.evaluate_mode(y, prec, Mode::Mirror)
}

/// `f(φ^[n](x)) − λⁿf(x) − Σ_{k<n} λ^{n−1−k} γ(φ^[k](x))`.
pub fn orbit_sum_check(sol: &GlobalSolution, x: &Value, n: usize, prec: u32) -> Result<FValue> {
    let wp = prec + GUARD;
    let mut orbit = vec![x.clone()];
    for k in 0..n {
        let next = sol.phi_at(&orbit[k], wp).ok_or(Error::OrbitEscape(k + 1))?;
        orbit.push(next);
    }
    let dispatch = Mode::Dispatch { mirror: true };
    let lhs = sol.eval_raw(&orbit[n], wp, dispatch)?.0;
    let lambda = sol.lambda_value();
    let mut rhs = sol.eval_raw(x, wp, dispatch)?.0;
    for xk in &orbit[..n] {
        rhs = lambda.mul(&rhs).add(&sol.gamma_at(xk, wp));
    }
    Ok(lhs.sub(&rhs).rounded(prec))
}

pub(super) fn eval_value(sol: &GlobalSolution, x: &Value, wp: u32) -> Result<FValue> {
    Ok(sol.eval_raw(x, wp, Mode::Dispatch { mirror: true })?.0)
}

pub(super) fn gamma_value(sol: &GlobalSolution, x: &Value, wp: u32) -> FValue {
    sol.gamma_at(x, wp)
}
