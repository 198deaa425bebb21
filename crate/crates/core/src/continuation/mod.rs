//! Global solutions of `f(φ(x)) − λf(x) = γ(x)` built from a convergent local
//! series by following orbits into a core interval around the fixed point.

mod extend;
mod preimage;

pub use extend::*;
pub use preimage::*;

use std::fmt;

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::{rpow, simplest_between, GaussRat, Real};
use crate::rootwork::{attraction_basin_check, BasinVerdict};
use crate::series::{LocalSolution, RadiusVerdict, Series};
use crate::symbols::{check_maps_into, AnalyticSymbol, Body, Interval, Value};

pub const DEFAULT_MAX_DEPTH: usize = 10_000;
/// Highest precision tried before giving up with `PrecisionLoss`.
pub const MAX_PRECISION: u32 = 4096;

/// Core radius used when every computed tail coefficient vanishes.
const POLYNOMIAL_CORE: i64 = 1;
const CORE_FLOOR_BITS: u32 = 20;
const BASIN_SAMPLES: usize = 32;

/// A value of `f`: exact Gaussian rational or a complex float.
#[derive(Clone, Debug, PartialEq)]
pub enum FValue {
    Exact(GaussRat),
    Approx(Complex),
}

impl FValue {
    pub fn zero() -> Self {
        FValue::Exact(GaussRat::zero())
    }

    pub fn from_point(v: &Value) -> Self {
        match v {
            Value::Exact(r) => FValue::Exact(GaussRat::real(r.clone())),
            Value::Approx(f) => FValue::Approx(Complex::with_val(f.prec(), f)),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, FValue::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&GaussRat> {
        match self {
            FValue::Exact(z) => Some(z),
            FValue::Approx(_) => None,
        }
    }

    pub fn to_complex(&self, prec: u32) -> Complex {
        match self {
            FValue::Exact(z) => z.to_complex(prec),
            FValue::Approx(c) => Complex::with_val(prec, c),
        }
    }

    pub fn abs(&self, prec: u32) -> Float {
        match self {
            FValue::Exact(z) => Float::with_val(prec, &z.norm_sq()).sqrt(),
            FValue::Approx(c) => Float::with_val(prec, c.abs_ref()),
        }
    }

    fn prec_of(&self, o: &Self, fallback: u32) -> u32 {
        match (self, o) {
            (FValue::Approx(a), FValue::Approx(b)) => a.prec().0.max(b.prec().0),
            (FValue::Approx(a), _) | (_, FValue::Approx(a)) => a.prec().0,
            _ => fallback,
        }
    }

    fn binop(
        &self,
        o: &Self,
        exact: impl Fn(&GaussRat, &GaussRat) -> Result<GaussRat>,
        approx: impl Fn(&Complex, &Complex) -> Complex,
    ) -> Result<FValue> {
        match (self, o) {
            (FValue::Exact(a), FValue::Exact(b)) => exact(a, b).map(FValue::Exact),
            _ => {
                let p = self.prec_of(o, 64);
                Ok(FValue::Approx(approx(&self.to_complex(p), &o.to_complex(p))))
            }
        }
    }

    pub fn add(&self, o: &Self) -> FValue {
        self.binop(o, |a, b| Ok(a + b), |a, b| Complex::with_val(a.prec(), a + b))
            .expect("addition is total")
    }

    pub fn sub(&self, o: &Self) -> FValue {
        self.binop(o, |a, b| Ok(a - b), |a, b| Complex::with_val(a.prec(), a - b))
            .expect("subtraction is total")
    }

    pub fn mul(&self, o: &Self) -> FValue {
        self.binop(o, |a, b| Ok(a * b), |a, b| Complex::with_val(a.prec(), a * b))
            .expect("multiplication is total")
    }

    pub fn div(&self, o: &Self) -> Result<FValue> {
        if o.abs(64).is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        self.binop(o, |a, b| a.div(b), |a, b| Complex::with_val(a.prec(), a / b))
    }

    pub fn rounded(self, prec: u32) -> FValue {
        match self {
            FValue::Approx(c) => FValue::Approx(Complex::with_val(prec, c)),
            v => v,
        }
    }
}

impl fmt::Display for FValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FValue::Exact(z) => write!(f, "{z}"),
            FValue::Approx(c) => {
                let digits = ((c.prec().0 as f64) * std::f64::consts::LOG10_2) as usize;
                let re = crate::symbols::fmt_float(c.real(), digits);
                if c.imag().is_zero() {
                    write!(f, "{re}")
                } else {
                    write!(f, "{re} + ({})i", crate::symbols::fmt_float(c.imag(), digits))
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FValueRepr {
    Exact(String),
    Approx { re: String, im: String, bits: u32 },
}

impl Serialize for FValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FValue::Exact(z) => FValueRepr::Exact(z.to_string()),
            FValue::Approx(c) => FValueRepr::Approx {
                re: c.real().to_string_radix(10, None),
                im: c.imag().to_string_radix(10, None),
                bits: c.prec().0,
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<FValue, D::Error> {
        use serde::de::Error as _;
        match FValueRepr::deserialize(d)? {
            FValueRepr::Exact(s) => s.parse().map(FValue::Exact).map_err(D::Error::custom),
            FValueRepr::Approx { re, im, bits } => {
                let re = Float::parse(&re).map_err(D::Error::custom)?;
                let im = Float::parse(&im).map_err(D::Error::custom)?;
                Ok(FValue::Approx(Complex::with_val(bits, (re, im))))
            }
        }
    }
}

/// Explicit inverse of one monotone branch of the symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branch {
    /// `ψ(x) = 2x/(μ + √(μ² − 4x))`, the inverse of `−y² + μy` on `y ≤ μ/2`.
    QuadraticLeft {
        #[serde(with = "crate::num::rational_string")]
        mu: Rational,
    },
}

impl Branch {
    pub fn quadratic_left(mu: Rational) -> Result<Branch> {
        if mu <= 0 {
            return Err(Error::InvalidParameter(format!("branch needs μ > 0, got {mu}")));
        }
        Ok(Branch::QuadraticLeft { mu })
    }

    /// `ψ(x)`, exact whenever `μ² − 4x` is a rational square.
    pub fn apply(&self, x: &Value, prec: u32) -> Result<Value> {
        let Branch::QuadraticLeft { mu } = self;
        let out_of_range = || Error::BranchDomain(format!("{x} exceeds the critical value {}", rpow(mu, 2) / 4u32));
        match x {
            Value::Exact(r) => {
                let disc = Rational::from(mu * mu) - Rational::from(r * 4u32);
                if disc < 0 {
                    return Err(out_of_range());
                }
                if let Some(s) = rational_sqrt(&disc) {
                    return Ok(Value::Exact(Rational::from(r * 2u32) / (s + mu)));
                }
                Ok(Value::Approx(Self::float_branch(mu, &Float::with_val(prec, r), prec)))
            }
            Value::Approx(f) => {
                let disc = Float::with_val(prec, Rational::from(mu * mu)) - Float::with_val(prec, f * 4u32);
                if disc < 0 {
                    return Err(out_of_range());
                }
                Ok(Value::Approx(Self::float_branch(mu, f, prec)))
            }
        }
    }

    fn float_branch(mu: &Rational, x: &Float, prec: u32) -> Float {
        let disc = Float::with_val(prec, Rational::from(mu * mu)) - Float::with_val(prec, x * 4u32);
        let den = Float::with_val(prec, disc.max(&Float::new(prec)).sqrt()) + Float::with_val(prec, mu);
        Float::with_val(prec, x * 2u32) / den
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Branch::QuadraticLeft { mu } = self;
        write!(f, "ψ(x) = 2x/({mu} + √({} − 4x))", Rational::from(mu * mu))
    }
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if *r < 0 || !r.numer().is_perfect_square() || !r.denom().is_perfect_square() {
        return None;
    }
    Some(Rational::from((r.numer().clone().sqrt(), r.denom().clone().sqrt())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    ForwardOrbit {
        max_depth: usize,
    },
    InverseBranch {
        branch: Branch,
        region: Interval,
        max_depth: usize,
    },
    /// `f(y) = f(2a − y) + (γ(2a − y) − γ(y))/λ` for symbols symmetric about `a`.
    Mirror {
        #[serde(with = "crate::num::rational_string")]
        axis: Rational,
        region: Interval,
    },
}

/// Extension rules for `−x² + μx`: forward orbits, the left inverse branch on
/// negative points, and reflection across `μ/2`.
pub fn quadratic_rules(mu: &Rational) -> Result<Vec<Rule>> {
    let axis = Rational::from(mu / 2u32);
    Ok(vec![
        Rule::ForwardOrbit {
            max_depth: DEFAULT_MAX_DEPTH,
        },
        Rule::InverseBranch {
            branch: Branch::quadratic_left(mu.clone())?,
            region: Interval::new(None, Some(Rational::new()))?,
            max_depth: DEFAULT_MAX_DEPTH,
        },
        Rule::Mirror {
            axis: axis.clone(),
            region: Interval::new(Some(axis), None)?,
        },
    ])
}

/// A local solution together with the data needed to continue it along orbits.
/// Immutable once built, so evaluations may run concurrently.
#[derive(Clone, Debug)]
pub struct GlobalSolution {
    pub phi: AnalyticSymbol,
    pub gamma: Body,
    /// The equation solved is `f(φ(x)) − λf(x) = scale·γ(x)`.
    pub gamma_scale: GaussRat,
    pub local: LocalSolution,
    /// Half the estimated radius; `None` when the computed tail vanishes.
    pub r_safe: Option<Rational>,
    pub core: Interval,
    /// Whether `φ(core) ⊆ core` was certified; neutral multipliers leave this open.
    pub core_invariant: bool,
    pub basin: Option<BasinVerdict>,
    pub rules: Vec<Rule>,
}

impl GlobalSolution {
    /// Builds the core from the radius verdict of `local`. `core_radius` overrides
    /// the automatic choice but is still shrunk until the core is invariant.
    pub fn new(
        phi: AnalyticSymbol,
        gamma: Body,
        gamma_scale: GaussRat,
        local: LocalSolution,
        core_radius: Option<Rational>,
        prec: u32,
    ) -> Result<Self> {
        let r_est = match &local.radius {
            RadiusVerdict::Converges { r_est } => *r_est,
            v => return Err(Error::NotConvergent(format!("radius verdict is {}", v.label()))),
        };
        let floor = Rational::from((1, 1u64 << CORE_FLOOR_BITS));
        let r_safe = match r_est {
            Some(r) => {
                let lo = Rational::from_f64(r * 0.49).unwrap_or_default();
                let hi = Rational::from_f64(r * 0.5).unwrap_or_default();
                let s = simplest_between(&lo, &hi);
                if s < floor {
                    return Err(Error::NotConvergent(format!("estimated radius {r:e} is below the floor")));
                }
                Some(s)
            }
            None => None,
        };
        let u = center_rational(local.center(), prec);
        let mut rho = match (&core_radius, &r_safe) {
            (Some(c), _) => c.clone(),
            (None, Some(s)) => {
                let t = truncation_radius(&local.series, prec);
                let limited = t.map_or(s.clone(), |t| t.min(s.clone()));
                limited.max(floor.clone().min(s.clone()))
            }
            (None, None) => Rational::from(POLYNOMIAL_CORE),
        };
        if rho <= 0 {
            return Err(Error::InvalidParameter("core radius must be positive".into()));
        }
        let domain = phi.domain().clone();
        let make = |rho: &Rational| Interval::finite(Rational::from(&u - rho), Rational::from(&u + rho));
        let mut core = make(&rho)?;
        while !domain.contains_interval(&core) {
            rho /= 2u32;
            if rho < floor {
                return Err(Error::HypothesisViolation(format!("no core around {u} fits in {domain}")));
            }
            core = make(&rho)?;
        }
        let contracting = local.multiplier.abs_cmp_one() == Some(std::cmp::Ordering::Less);
        let mut core_invariant = false;
        if contracting {
            for _ in 0..64 {
                if check_maps_into(phi.body(), &core, &core).is_ok() {
                    core_invariant = true;
                    break;
                }
                rho /= 2u32;
                core = make(&rho)?;
            }
            if !core_invariant {
                return Err(Error::HypothesisViolation(format!("could not shrink the core so that φ(core) ⊆ core around {u}")));
            }
        }
        let basin = if core_invariant {
            attraction_basin_check(&phi, &core, DEFAULT_MAX_DEPTH, BASIN_SAMPLES).ok()
        } else {
            None
        };
        Ok(GlobalSolution {
            phi,
            gamma,
            gamma_scale,
            local,
            r_safe,
            core,
            core_invariant,
            basin,
            rules: vec![Rule::ForwardOrbit {
                max_depth: DEFAULT_MAX_DEPTH,
            }],
        })
    }

    pub fn with_rules(mut self, rules: Vec<Rule>) -> Self {
        self.rules = rules;
        self
    }

    pub fn lambda(&self) -> &GaussRat {
        &self.local.lambda
    }
}

fn center_rational(c: &Real, prec: u32) -> Rational {
    match c.as_rational() {
        Some(r) => r.clone(),
        None => {
            let (lo, hi) = c.enclosure(prec);
            simplest_between(&lo, &hi)
        }
    }
}

/// Largest radius at which the last computed coefficients stay below the
/// working tolerance, so the truncated series is accurate on the core.
fn truncation_radius(series: &Series, prec: u32) -> Option<Rational> {
    let n = series.order();
    let log_tol = -((prec.saturating_sub(32)) as f64) * std::f64::consts::LN_2 - 4f64.ln();
    let fs = series.to_float_series(128);
    let mut best: Option<f64> = None;
    for k in n.saturating_sub(2).max(1)..=n {
        let c = Float::with_val(128, fs.coeff(k).abs_ref());
        if c.is_zero() {
            continue;
        }
        let r = ((log_tol - c.ln().to_f64()) / k as f64).exp();
        best = Some(best.map_or(r, |b: f64| b.min(r)));
    }
    let r = best?;
    let lo = Rational::from_f64(r * 0.9)?;
    let hi = Rational::from_f64(r)?;
    Some(simplest_between(&lo, &hi))
}
