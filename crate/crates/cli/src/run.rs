use compspec::continuation::{
    evaluate, orbit_table, prop45_witness_demo, quadratic_rules, Evaluation, GlobalSolution, OrbitTable, Rule,
    WitnessReport, MAX_PRECISION,
};
use compspec::num::{parse_rational, GaussRat, Real};
use compspec::rootwork::{find_fixed_points, FixedPointSet, MultiplierKind};
use compspec::series::{estimate_radius, koenigs, solve_formal_scaled, LocalSolution, RadiusVerdict, Series};
use compspec::symbols::{parse_expr, AnalyticSymbol, Body, Interval, Value};
use compspec::taxonomy::{covering_obstruction, spectrum, ClassificationReport, CoveringObstruction, Piece};
use compspec::{Error, Result};
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::{Command, Equation, Format, Orientation, Output, SymbolArgs};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub fixed_point: Real,
    pub orientation: String,
    /// The equation solved is `f(φ(x)) − λf(x) = gamma_scale·γ(x)`.
    pub gamma_scale: GaussRat,
    pub note: Option<String>,
    pub solution: LocalSolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fixed_point: Real,
    pub orientation: String,
    pub gamma_scale: GaussRat,
    pub note: Option<String>,
    pub core: Interval,
    pub core_invariant: bool,
    #[serde(with = "compspec::num::rational_opt")]
    pub r_safe: Option<Rational>,
    pub rules: Vec<Rule>,
    pub evaluation: Evaluation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KoenigsReport {
    pub fixed_point: Real,
    pub multiplier: Real,
    pub series: Series,
    pub radius: RadiusVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Classify(ClassificationReport),
    Solve(SolveReport),
    Eval(EvalReport),
    Koenigs(KoenigsReport),
    Orbit(OrbitTable),
    Obstruct(CoveringObstruction),
    Demo45(WitnessReport),
}

impl Report {
    pub fn to_json(&self) -> String {
        let text = match self {
            Report::Classify(r) => serde_json::to_string_pretty(r),
            Report::Solve(r) => serde_json::to_string_pretty(r),
            Report::Eval(r) => serde_json::to_string_pretty(r),
            Report::Koenigs(r) => serde_json::to_string_pretty(r),
            Report::Orbit(r) => serde_json::to_string_pretty(r),
            Report::Obstruct(r) => serde_json::to_string_pretty(r),
            Report::Demo45(r) => serde_json::to_string_pretty(r),
        };
        text.expect("reports serialize")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => crate::text::render(self),
        }
    }
}

fn precision(out: &Output) -> Result<u32> {
    if out.precision < 64 || out.precision > MAX_PRECISION {
        return Err(Error::InvalidParameter(format!(
            "precision must be between 64 and {MAX_PRECISION} bits, got {}",
            out.precision
        )));
    }
    Ok(out.precision)
}

fn interval(text: &str) -> Result<Interval> {
    text.parse()
}

fn symbol(args: &SymbolArgs) -> Result<AnalyticSymbol> {
    let j = interval(&args.interval)?;
    AnalyticSymbol::parse(&args.symbol, j)
}

fn lambda(text: &str) -> Result<GaussRat> {
    text.parse()
}

fn rational(name: &str, text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| Error::InvalidParameter(format!("--{name} must be a rational number, got {text:?}")))
}

struct Parsed {
    lambda: GaussRat,
    gamma: Body,
    scale: GaussRat,
    orientation: &'static str,
    note: Option<String>,
}

fn equation(eq: &Equation) -> Result<Parsed> {
    let lambda = lambda(&eq.lambda)?;
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let gamma = Body::from_expr(parse_expr(&eq.gamma)?);
    Ok(match eq.orientation {
        Orientation::Resolvent => Parsed {
            lambda,
            gamma,
            scale: GaussRat::one(),
            orientation: "resolvent",
            note: None,
        },
        Orientation::Section1 => Parsed {
            scale: -&lambda,
            note: Some(format!(
                "f − (1/λ)f∘φ = γ̃ was converted to f(φ(x)) − λf(x) = γ(x) with γ = −λγ̃ = ({})·γ̃",
                -&lambda
            )),
            lambda,
            gamma,
            orientation: "section1",
        },
    })
}

/// The fixed point to expand at: attracting before others, exact before approximate.
fn pick_fixed_point(phi: &AnalyticSymbol, need_attracting: bool) -> Result<(Real, Real)> {
    let points = match find_fixed_points(phi) {
        FixedPointSet::AllFixed => {
            return Err(Error::HypothesisViolation("every point is fixed; there is no isolated fixed point".into()))
        }
        set => set.points().to_vec(),
    };
    let attracting = |k: MultiplierKind| matches!(k, MultiplierKind::Attracting | MultiplierKind::Superattracting);
    let mut ranked: Vec<_> = points.iter().collect();
    ranked.sort_by_key(|p| (!attracting(p.kind), !p.location.is_exact()));
    match ranked.first() {
        Some(p) if !need_attracting || attracting(p.kind) => Ok((p.location.clone(), p.multiplier.clone())),
        Some(_) => Err(Error::NeutralOrSuperattracting(
            "no fixed point with 0 < |m| < 1 was found".into(),
        )),
        None => Err(Error::HypothesisViolation(format!("{phi} has no fixed point"))),
    }
}

/// `−x² + μx` with `μ > 0` gets the inverse-branch and mirror rules.
fn rules_for(phi: &AnalyticSymbol) -> Result<Option<Vec<Rule>>> {
    let Some(p) = phi.as_poly() else {
        return Ok(None);
    };
    let c = p.coeffs();
    if c.len() == 3 && c[0] == 0 && c[2] == -1 && c[1] > 0 && phi.domain().is_real_line() {
        return quadratic_rules(&c[1]).map(Some);
    }
    Ok(None)
}

/// A covering piece: parts joined by `|`, with a leading `*` on the determining part.
fn piece(text: &str) -> Result<Piece> {
    let mut parts = Vec::new();
    let mut determining = None;
    for (i, raw) in text.split('|').enumerate() {
        let raw = raw.trim();
        let body = match raw.strip_prefix('*') {
            Some(rest) => {
                if determining.replace(i).is_some() {
                    return Err(Error::InvalidParameter(format!("piece {text:?} marks two determining parts")));
                }
                rest
            }
            None => raw,
        };
        parts.push(interval(body)?);
    }
    Ok(match (parts.len(), determining) {
        (1, _) => Piece::interval(parts.remove(0)),
        (_, Some(k)) => Piece::union(parts, k),
        (_, None) => Piece {
            parts,
            determining: None,
        },
    })
}

pub fn run(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Classify { symbol: s, out } => {
            precision(out)?;
            let phi = symbol(s)?;
            Ok(Report::Classify(spectrum(&phi)))
        }
        Command::Solve { symbol: s, eq, order, out } => {
            let prec = precision(out)?;
            let phi = symbol(s)?;
            let e = equation(eq)?;
            let (u, _) = pick_fixed_point(&phi, false)?;
            let solution = solve_formal_scaled(&phi, &u, &e.lambda, &e.gamma, &e.scale, *order, prec)?;
            Ok(Report::Solve(SolveReport {
                fixed_point: u,
                orientation: e.orientation.into(),
                gamma_scale: e.scale,
                note: e.note,
                solution,
            }))
        }
        Command::Eval {
            symbol: s,
            eq,
            order,
            at,
            out,
        } => {
            let prec = precision(out)?;
            let phi = symbol(s)?;
            let e = equation(eq)?;
            let x: Value = at.parse()?;
            let rules = rules_for(&phi)?;
            let (u, _) = pick_fixed_point(&phi, false)?;
            let local = solve_formal_scaled(&phi, &u, &e.lambda, &e.gamma, &e.scale, *order, prec)?;
            let mut sol = GlobalSolution::new(phi, e.gamma, e.scale.clone(), local, None, prec)?;
            if let Some(r) = rules {
                sol = sol.with_rules(r);
            }
            let evaluation = evaluate(&sol, &x, prec)?;
            Ok(Report::Eval(EvalReport {
                fixed_point: u,
                orientation: e.orientation.into(),
                gamma_scale: e.scale,
                note: e.note,
                core: sol.core.clone(),
                core_invariant: sol.core_invariant,
                r_safe: sol.r_safe.clone(),
                rules: sol.rules.clone(),
                evaluation,
            }))
        }
        Command::Koenigs { symbol: s, order, out } => {
            let prec = precision(out)?;
            let phi = symbol(s)?;
            let (u, m) = pick_fixed_point(&phi, true)?;
            let series = koenigs(&phi, &u, *order, prec)?;
            let radius = estimate_radius(&series);
            Ok(Report::Koenigs(KoenigsReport {
                fixed_point: u,
                multiplier: m,
                series,
                radius,
            }))
        }
        Command::Orbit { mu, depth, out } => {
            let prec = precision(out)?;
            let mu = rational("mu", mu)?;
            Ok(Report::Orbit(orbit_table(&mu, *depth, prec)?))
        }
        Command::Obstruct {
            symbol: s,
            lambda: l,
            pieces,
            out,
        } => {
            precision(out)?;
            let phi = symbol(s)?;
            let l = lambda(l)?;
            let pieces = pieces.split(';').map(piece).collect::<Result<Vec<_>>>()?;
            Ok(Report::Obstruct(covering_obstruction(&phi, &l, &pieces)?))
        }
        Command::Demo45 {
            mu,
            lambda: l,
            k,
            c,
            depth,
            out,
        } => {
            let prec = precision(out)?;
            let mu = rational("mu", mu)?;
            let l = lambda(l)?;
            let c = rational("c", c)?;
            Ok(Report::Demo45(prop45_witness_demo(&mu, &l, *k, &c, *depth, prec)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::Parser;
    use serde::de::DeserializeOwned;

    use super::*;
    use crate::Cli;

    fn report(args: &[&str]) -> Report {
        let cli = Cli::try_parse_from(std::iter::once("compspec").chain(args.iter().copied())).unwrap();
        run(&cli.command).unwrap()
    }

    fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(r: &T, text: &str) {
        let back: T = serde_json::from_str(text).unwrap();
        assert_eq!(&back, r);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    }

    #[test]
    fn reports_round_trip() {
        let catalog: [&[&str]; 8] = [
            &["classify", "--symbol", "-x^2+4*x"],
            &["classify", "--symbol", "exp(x/2)"],
            &["solve", "--symbol", "-x^2+x", "--lambda", "2", "--gamma", "x", "--order", "24"],
            &["eval", "--symbol", "1/2*arctan(x)", "--lambda", "2+1/2i", "--gamma", "x", "--at", "9/2"],
            &["koenigs", "--symbol", "x/2-x^2", "--order", "18"],
            &["orbit", "--mu", "5", "--depth", "10"],
            &["obstruct", "--symbol", "-x^2+2*x", "--lambda", "-1", "--pieces", "*(-inf,1)|(1,inf);(0,2)"],
            &["demo45", "--mu", "3", "--lambda", "1/2i"],
        ];
        for args in catalog {
            let r = report(args);
            let text = r.to_json();
            match &r {
                Report::Classify(x) => round_trip(x, &text),
                Report::Solve(x) => round_trip(x, &text),
                Report::Eval(x) => round_trip(x, &text),
                Report::Koenigs(x) => round_trip(x, &text),
                Report::Orbit(x) => round_trip(x, &text),
                Report::Obstruct(x) => round_trip(x, &text),
                Report::Demo45(x) => round_trip(x, &text),
            }
        }
    }

    #[test]
    fn pieces_parse() {
        let p = piece("*(-inf,1/2) | (1,inf)").unwrap();
        assert_eq!(p.parts.len(), 2);
        assert_eq!(p.determining, Some(0));
        assert!(piece("*(0,1)|*(2,3)").is_err());
        assert_eq!(piece("(0,1)").unwrap().parts.len(), 1);
    }
}
