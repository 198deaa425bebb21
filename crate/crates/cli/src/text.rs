use std::fmt::Write;

use compspec::continuation::{Evaluation, FValue, RuleKind};
use compspec::series::{RadiusVerdict, Series};
use compspec::symbols::{fmt_float, Value};

use crate::run::Report;

fn coefficient(series: &Series, k: usize) -> String {
    match series {
        Series::Exact(s) => s.coeff(k).to_string(),
        Series::Float(s) => FValue::Approx(s.coeff(k).clone()).to_string(),
    }
}

fn series_lines(out: &mut String, series: &Series) {
    writeln!(out, "center: {}", series.center()).unwrap();
    for k in 0..=series.order() {
        writeln!(out, "  c_{k} = {}", coefficient(series, k)).unwrap();
    }
}

fn verdict(v: &RadiusVerdict) -> String {
    match v {
        RadiusVerdict::Converges { r_est: Some(r) } => format!("verdict: converges (r_est ≈ {r:.6e})"),
        RadiusVerdict::Converges { r_est: None } => "verdict: converges (computed tail vanishes)".into(),
        RadiusVerdict::Diverges { certificate: c } => format!(
            "verdict: diverges (|f_n| ≥ (n−1)!·{}^n for {} ≤ n ≤ {})",
            compspec::num::fmt_rational(&c.c),
            c.from,
            c.to
        ),
        RadiusVerdict::Inconclusive { reason } => format!("verdict: inconclusive ({reason})"),
    }
}

fn short(v: &Value) -> String {
    match v {
        Value::Exact(_) => v.to_string(),
        Value::Approx(f) => fmt_float(f, 20),
    }
}

fn trace(out: &mut String, e: &Evaluation) {
    writeln!(out, "f({}) = {}", e.x, e.value).unwrap();
    writeln!(out, "depth: {}", e.depth).unwrap();
    for s in &e.chain {
        let name = match s.rule {
            RuleKind::Series => "series",
            RuleKind::ForwardOrbit => "forward orbit",
            RuleKind::InverseBranch => "inverse branch",
            RuleKind::Mirror => "mirror",
        };
        writeln!(out, "  {name} from {} ({} steps)", short(&s.from), s.steps).unwrap();
    }
    match (&e.residual, e.residual_ok) {
        (Some(r), Some(ok)) => {
            let mag = fmt_float(&r.abs(64), 6);
            let bound = e.precision.saturating_sub(32);
            let status = if ok { "within" } else { "exceeds" };
            writeln!(out, "residual: {mag} ({status} 2^-{bound})").unwrap();
        }
        _ => writeln!(out, "residual: unavailable (f(φ(x)) is not covered)").unwrap(),
    }
}

pub fn render(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Classify(r) => write!(out, "{r}").unwrap(),
        Report::Solve(r) => {
            let s = &r.solution;
            writeln!(out, "fixed point: {}", r.fixed_point).unwrap();
            writeln!(out, "multiplier: {}", s.multiplier).unwrap();
            writeln!(out, "lambda: {}", s.lambda).unwrap();
            writeln!(out, "gamma: ({})·({})", r.gamma_scale, s.gamma).unwrap();
            if let Some(n) = &r.note {
                writeln!(out, "note: {n}").unwrap();
            }
            series_lines(&mut out, &s.series);
            writeln!(out, "{}", verdict(&s.radius)).unwrap();
        }
        Report::Eval(r) => {
            writeln!(out, "fixed point: {}", r.fixed_point).unwrap();
            writeln!(out, "core: {} (invariant: {})", r.core, r.core_invariant).unwrap();
            if let Some(n) = &r.note {
                writeln!(out, "note: {n}").unwrap();
            }
            trace(&mut out, &r.evaluation);
        }
        Report::Koenigs(r) => {
            writeln!(out, "fixed point: {}", r.fixed_point).unwrap();
            writeln!(out, "multiplier: {}", r.multiplier).unwrap();
            series_lines(&mut out, &r.series);
            writeln!(out, "{}", verdict(&r.radius)).unwrap();
        }
        Report::Orbit(t) => {
            writeln!(out, "mu = {}, {} bits", compspec::num::fmt_rational(&t.mu), t.precision).unwrap();
            writeln!(out, "{:>4}  {:<28}  {:<28}  forward error", "n", "x_n", "x_n/x_(n-1)").unwrap();
            for row in &t.rows {
                let ratio = row.ratio.as_ref().map(short).unwrap_or_else(|| "-".into());
                writeln!(
                    out,
                    "{:>4}  {:<28}  {:<28}  {}",
                    row.n,
                    short(&row.x),
                    ratio,
                    fmt_float(&row.forward_error.to_float(64), 4)
                )
                .unwrap();
            }
            writeln!(out, "strictly decreasing: {}", t.decreasing).unwrap();
            writeln!(out, "all ratios below 2/mu: {}", t.ratio_bound_holds).unwrap();
        }
        Report::Obstruct(c) => {
            writeln!(out, "lambda: {}", c.lambda).unwrap();
            for (i, p) in c.pieces.iter().enumerate() {
                writeln!(out, "piece {i}: {}  dim ker = {}", p.piece, p.kernel).unwrap();
            }
            for k in &c.intersections {
                writeln!(out, "piece {} ∩ piece {}: {}  dim ker = {}", k.pieces.0, k.pieces.1, k.set, k.kernel).unwrap();
            }
            let v = match c.verdict {
                compspec::taxonomy::CoveringVerdict::NotSurjective => "not surjective",
                compspec::taxonomy::CoveringVerdict::Inconclusive => "inconclusive",
            };
            writeln!(out, "verdict: {v}").unwrap();
        }
        Report::Demo45(w) => {
            writeln!(out, "gamma = x^{}·{}", w.k, w.gamma0).unwrap();
            writeln!(out, "lhs gamma(mu-1)/(1-lambda) = {}", w.lhs).unwrap();
            writeln!(out, "gamma(1) = {}", w.gamma_at_one).unwrap();
            writeln!(out, "tail over x_2..x_{} = {} (|tail| = {})", w.n, w.tail, short(&w.tail_abs)).unwrap();
            writeln!(out, "bound 6c = {}", compspec::num::fmt_rational(&w.bound)).unwrap();
            writeln!(out, "margin = {}", short(&w.margin)).unwrap();
            writeln!(out, "contradiction: {}", w.contradiction).unwrap();
            writeln!(out, "note: {}", w.note).unwrap();
        }
    }
    out.trim_end().to_string()
}
