//! Exact and multiprecision evaluation of expression trees, and Taylor
//! jets by series recurrences.

use rug::float::Constant;
use rug::{Float, Integer, Rational};

use super::expr::Expr;
use crate::num::simplest_between;

/// Coefficient arithmetic used by the jet recurrences. Exact rationals only
/// support transcendental functions at arguments where the value is rational.
pub(crate) trait JetNum: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn from_rat(&self, r: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn exp0(&self) -> Option<Self>;
    fn atan0(&self) -> Option<Self>;
    fn sin_cos0(&self) -> Option<(Self, Self)>;
    fn sqrt0(&self) -> Option<Self>;
    fn asinh0(&self) -> Option<Self>;
    fn inverse0(forward: &Expr, target: &Self) -> Option<Self>;
    fn from_int(&self, n: i64) -> Self {
        self.from_rat(&Rational::from(n))
    }
}

impl JetNum for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn from_rat(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (*o != 0).then(|| Rational::from(self / o))
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn exp0(&self) -> Option<Self> {
        (*self == 0).then(|| Rational::from(1))
    }
    fn atan0(&self) -> Option<Self> {
        (*self == 0).then(Rational::new)
    }
    fn sin_cos0(&self) -> Option<(Self, Self)> {
        (*self == 0).then(|| (Rational::new(), Rational::from(1)))
    }
    fn sqrt0(&self) -> Option<Self> {
        if *self < 0 {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        (n.is_perfect_square() && d.is_perfect_square())
            .then(|| Rational::from((Integer::from(n.sqrt_ref()), Integer::from(d.sqrt_ref()))))
    }
    fn asinh0(&self) -> Option<Self> {
        (*self == 0).then(Rational::new)
    }
    fn inverse0(forward: &Expr, target: &Self) -> Option<Self> {
        let prec = 256;
        let y = solve_inverse(forward, &Float::with_val(prec, target), prec)?;
        let eps = Float::with_val(prec, 1) >> 200;
        let lo = Float::with_val(prec, &y - &eps).to_rational()?;
        let hi = Float::with_val(prec, &y + &eps).to_rational()?;
        let cand = simplest_between(&lo, &hi);
        (eval_exact(forward, &cand)? == *target).then_some(cand)
    }
}

impl JetNum for Float {
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn from_rat(&self, r: &Rational) -> Self {
        Float::with_val(self.prec(), r)
    }
    fn add(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (!o.is_zero()).then(|| Float::with_val(self.prec(), self / o))
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn exp0(&self) -> Option<Self> {
        Some(Float::with_val(self.prec(), self.exp_ref()))
    }
    fn atan0(&self) -> Option<Self> {
        Some(Float::with_val(self.prec(), self.atan_ref()))
    }
    fn sin_cos0(&self) -> Option<(Self, Self)> {
        let p = self.prec();
        Some((Float::with_val(p, self.sin_ref()), Float::with_val(p, self.cos_ref())))
    }
    fn sqrt0(&self) -> Option<Self> {
        (*self >= 0).then(|| Float::with_val(self.prec(), self.sqrt_ref()))
    }
    fn asinh0(&self) -> Option<Self> {
        Some(Float::with_val(self.prec(), self.asinh_ref()))
    }
    fn inverse0(forward: &Expr, target: &Self) -> Option<Self> {
        solve_inverse(forward, target, target.prec())
    }
}

/// Exact value at a rational point, when every node has a rational value.
pub fn eval_exact(e: &Expr, x: &Rational) -> Option<Rational> {
    Some(match e {
        Expr::X => x.clone(),
        Expr::Const(c) => c.clone(),
        Expr::Add(a, b) => eval_exact(a, x)? + eval_exact(b, x)?,
        Expr::Sub(a, b) => eval_exact(a, x)? - eval_exact(b, x)?,
        Expr::Mul(a, b) => eval_exact(a, x)? * eval_exact(b, x)?,
        Expr::Neg(a) => -eval_exact(a, x)?,
        Expr::Pow(a, k) => crate::num::rpow(&eval_exact(a, x)?, *k),
        Expr::Exp(a) => eval_exact(a, x)?.exp0()?,
        Expr::Arctan(a) => eval_exact(a, x)?.atan0()?,
        Expr::Sin(a) => eval_exact(a, x)?.sin_cos0()?.0,
        Expr::Asinh(a) => eval_exact(a, x)?.asinh0()?,
        Expr::InverseOf { forward, arg } => Rational::inverse0(forward, &eval_exact(arg, x)?)?,
    })
}

/// Value at `x` computed at the precision of `x`.
pub fn eval_float(e: &Expr, x: &Float) -> Float {
    let p = x.prec();
    match e {
        Expr::X => x.clone(),
        Expr::Const(c) => Float::with_val(p, c),
        Expr::Add(a, b) => Float::with_val(p, eval_float(a, x) + eval_float(b, x)),
        Expr::Sub(a, b) => Float::with_val(p, eval_float(a, x) - eval_float(b, x)),
        Expr::Mul(a, b) => Float::with_val(p, eval_float(a, x) * eval_float(b, x)),
        Expr::Neg(a) => -eval_float(a, x),
        Expr::Pow(a, k) => {
            let v = eval_float(a, x);
            Float::with_val(p, rug::ops::Pow::pow(&v, *k))
        }
        Expr::Exp(a) => eval_float(a, x).exp(),
        Expr::Arctan(a) => eval_float(a, x).atan(),
        Expr::Sin(a) => eval_float(a, x).sin(),
        Expr::Asinh(a) => eval_float(a, x).asinh(),
        Expr::InverseOf { forward, arg } => {
            let t = eval_float(arg, x);
            solve_inverse(forward, &t, p).unwrap_or_else(|| Float::with_val(p, rug::float::Special::Nan))
        }
    }
}

/// Value and first derivative.
pub fn eval_with_derivative(e: &Expr, x: &Float) -> (Float, Float) {
    let j = jet_float(e, x, 1);
    (j[0].clone(), j[1].clone())
}

fn series_mul<T: JetNum>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len();
    let mut out = vec![a[0].zero_like(); n];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..n - i {
            out[i + j] = out[i + j].add(&a[i].mul(&b[j]));
        }
    }
    out
}

fn series_div<T: JetNum>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let mut out: Vec<T> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = a[k].clone();
        for j in 0..k {
            acc = acc.sub(&out[j].mul(&b[k - j]));
        }
        out.push(acc.div(&b[0])?);
    }
    Some(out)
}

fn series_exp<T: JetNum>(a: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let mut g = vec![a[0].exp0()?];
    for k in 1..n {
        let mut acc = a[0].zero_like();
        for j in 1..=k {
            acc = acc.add(&a[j].mul(&g[k - j]).mul(&a[0].from_int(j as i64)));
        }
        g.push(acc.div(&a[0].from_int(k as i64))?);
    }
    Some(g)
}

/// Antiderivative with constant term `c0`.
fn integrate<T: JetNum>(d: &[T], c0: T) -> Vec<T> {
    let mut out = vec![c0];
    for k in 1..=d.len() {
        let v = d[k - 1].div(&d[0].from_int(k as i64)).expect("nonzero integer");
        out.push(v);
    }
    out
}

fn derivative<T: JetNum>(a: &[T]) -> Vec<T> {
    (1..a.len()).map(|k| a[k].mul(&a[0].from_int(k as i64))).collect()
}

fn series_atan<T: JetNum>(a: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let g0 = a[0].atan0()?;
    if n == 1 {
        return Some(vec![g0]);
    }
    let sq = series_mul(a, a);
    let mut den: Vec<T> = sq[..n - 1].to_vec();
    den[0] = den[0].add(&a[0].from_int(1));
    let q = series_div(&derivative(a), &den)?;
    Some(integrate(&q, g0))
}

fn series_sqrt<T: JetNum>(b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let r0 = b[0].sqrt0()?;
    if r0.is_zero() {
        return None;
    }
    let two_r0 = r0.mul(&b[0].from_int(2));
    let mut r = vec![r0];
    for k in 1..n {
        let mut acc = b[k].clone();
        for j in 1..k {
            acc = acc.sub(&r[j].mul(&r[k - j]));
        }
        r.push(acc.div(&two_r0)?);
    }
    Some(r)
}

fn series_asinh<T: JetNum>(a: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let g0 = a[0].asinh0()?;
    if n == 1 {
        return Some(vec![g0]);
    }
    let mut b = series_mul(a, a);
    b[0] = b[0].add(&a[0].from_int(1));
    let root = series_sqrt(&b[..n - 1])?;
    let q = series_div(&derivative(a), &root)?;
    Some(integrate(&q, g0))
}

fn series_sin_cos<T: JetNum>(a: &[T]) -> Option<(Vec<T>, Vec<T>)> {
    let n = a.len();
    let (s0, c0) = a[0].sin_cos0()?;
    let mut s = vec![s0];
    let mut c = vec![c0];
    for k in 1..n {
        let mut ds = a[0].zero_like();
        let mut dc = a[0].zero_like();
        for j in 1..=k {
            let w = a[j].mul(&a[0].from_int(j as i64));
            ds = ds.add(&w.mul(&c[k - j]));
            dc = dc.sub(&w.mul(&s[k - j]));
        }
        let kk = a[0].from_int(k as i64);
        s.push(ds.div(&kk)?);
        c.push(dc.div(&kk)?);
    }
    Some((s, c))
}

/// Series reversion: `t` with `F(y0 + t) = target` where `f` is the jet of
/// `F` at `y0` and `target` has constant term `F(y0)`.
fn series_revert<T: JetNum>(f: &[T], target: &[T], y0: T) -> Option<Vec<T>> {
    let n = target.len();
    let f1 = f.get(1)?.clone();
    if f1.is_zero() {
        return None;
    }
    let mut t = vec![y0.zero_like(); n];
    for k in 1..n {
        // coefficient k of Σ_{j≥2} f_j t^j with t_k still zero
        let mut pow = t.clone();
        let mut acc = y0.zero_like();
        for fj in f.iter().take(n).skip(2) {
            pow = series_mul(&pow, &t);
            acc = acc.add(&fj.mul(&pow[k]));
        }
        t[k] = target[k].sub(&acc).div(&f1)?;
    }
    t[0] = y0;
    Some(t)
}

/// Taylor coefficients of `e` at a center, in the arithmetic of the center.
pub(crate) fn jet_generic<T: JetNum>(e: &Expr, x: &[T]) -> Option<Vec<T>> {
    let n = x.len();
    let z = x[0].zero_like();
    Some(match e {
        Expr::X => x.to_vec(),
        Expr::Const(c) => {
            let mut v = vec![z.clone(); n];
            v[0] = z.from_rat(c);
            v
        }
        Expr::Add(a, b) => {
            let (a, b) = (jet_generic(a, x)?, jet_generic(b, x)?);
            a.iter().zip(&b).map(|(p, q)| p.add(q)).collect()
        }
        Expr::Sub(a, b) => {
            let (a, b) = (jet_generic(a, x)?, jet_generic(b, x)?);
            a.iter().zip(&b).map(|(p, q)| p.sub(q)).collect()
        }
        Expr::Mul(a, b) => series_mul(&jet_generic(a, x)?, &jet_generic(b, x)?),
        Expr::Neg(a) => jet_generic(a, x)?.iter().map(|p| z.sub(p)).collect(),
        Expr::Pow(a, k) => {
            let a = jet_generic(a, x)?;
            let mut acc = vec![z.clone(); n];
            acc[0] = z.from_int(1);
            for _ in 0..*k {
                acc = series_mul(&acc, &a);
            }
            acc
        }
        Expr::Exp(a) => series_exp(&jet_generic(a, x)?)?,
        Expr::Arctan(a) => series_atan(&jet_generic(a, x)?)?,
        Expr::Sin(a) => series_sin_cos(&jet_generic(a, x)?)?.0,
        Expr::Asinh(a) => series_asinh(&jet_generic(a, x)?)?,
        Expr::InverseOf { forward, arg } => {
            let target = jet_generic(arg, x)?;
            let y0 = T::inverse0(forward, &target[0])?;
            let mut yv = vec![z.clone(); n];
            yv[0] = y0.clone();
            if n > 1 {
                yv[1] = z.from_int(1);
            }
            let f = jet_generic(forward, &yv)?;
            series_revert(&f, &target, y0)?
        }
    })
}

/// Exact jet at a rational center, if all node values are rational there.
pub fn jet_exact(e: &Expr, center: &Rational, order: usize) -> Option<Vec<Rational>> {
    let mut x = vec![Rational::new(); order + 1];
    x[0] = center.clone();
    if order >= 1 {
        x[1] = Rational::from(1);
    }
    jet_generic(e, &x)
}

/// Floating jet at the precision of `center`.
pub fn jet_float(e: &Expr, center: &Float, order: usize) -> Vec<Float> {
    let p = center.prec();
    let mut x = vec![Float::new(p); order + 1];
    x[0] = center.clone();
    if order >= 1 {
        x[1] = Float::with_val(p, 1);
    }
    jet_generic(e, &x).unwrap_or_else(|| vec![Float::with_val(p, rug::float::Special::Nan); order + 1])
}

/// Solves `forward(y) = target` for a strictly monotone `forward` by
/// bracketing and safeguarded Newton steps.
pub fn solve_inverse(forward: &Expr, target: &Float, prec: u32) -> Option<Float> {
    let wp = prec + 32;
    let t = Float::with_val(wp, target);
    let g = |y: &Float| Float::with_val(wp, eval_float(forward, y) - &t);
    let mut a = Float::with_val(wp, -1);
    let mut b = Float::with_val(wp, 1);
    let mut ga = g(&a);
    let mut gb = g(&b);
    let mut tries = 0;
    while !(ga.is_finite() && gb.is_finite()) || ga.cmp0() == gb.cmp0() {
        if ga.is_zero() {
            return Some(Float::with_val(prec, &a));
        }
        if gb.is_zero() {
            return Some(Float::with_val(prec, &b));
        }
        tries += 1;
        if tries > 80 {
            return None;
        }
        a *= 2;
        b *= 2;
        ga = g(&a);
        gb = g(&b);
    }
    let rising = gb > 0;
    let mut y = Float::with_val(wp, &a + &b) / 2u32;
    let tol = Float::with_val(wp, 1) >> (prec + 8);
    for _ in 0..(4 * wp) {
        let (v, d) = eval_with_derivative(forward, &y);
        let gy = Float::with_val(wp, &v - &t);
        if gy.is_zero() {
            break;
        }
        if (gy > 0) == rising {
            b = y.clone();
        } else {
            a = y.clone();
        }
        let newton = if d.is_zero() || !d.is_finite() {
            None
        } else {
            Some(Float::with_val(wp, &y - Float::with_val(wp, &gy / &d)))
        };
        let next = match newton {
            Some(n) if n > a && n < b => n,
            _ => Float::with_val(wp, &a + &b) / 2u32,
        };
        let step = Float::with_val(wp, &next - &y).abs();
        let scale = Float::with_val(wp, next.abs_ref()).max(&Float::with_val(wp, 1));
        y = next;
        if step <= Float::with_val(wp, &tol * &scale) {
            break;
        }
    }
    Some(Float::with_val(prec, &y))
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::expr::parse_expr;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn exact_jets_at_zero() {
        let e = parse_expr("1/2*arctan(x)").unwrap();
        let j = jet_exact(&e, &q(0, 1), 5).unwrap();
        assert_eq!(j, vec![q(0, 1), q(1, 2), q(0, 1), q(-1, 6), q(0, 1), q(1, 10)]);
        let e = parse_expr("exp(x)").unwrap();
        assert_eq!(jet_exact(&e, &q(0, 1), 2).unwrap(), vec![q(1, 1), q(1, 1), q(1, 2)]);
        assert!(jet_exact(&e, &q(1, 1), 2).is_none());
        let e = parse_expr("sin(x)").unwrap();
        assert_eq!(
            jet_exact(&e, &q(0, 1), 5).unwrap(),
            vec![q(0, 1), q(1, 1), q(0, 1), q(-1, 6), q(0, 1), q(1, 120)]
        );
    }

    #[test]
    fn asinh_and_inverse_agree() {
        // δ(y) = e^y − e^{−y}; its inverse is asinh(x/2)
        let delta = parse_expr("exp(x) - exp(-x)").unwrap();
        let closed = Expr::asinh(Expr::mul(Expr::Const(q(1, 2)), Expr::X));
        let numeric = Expr::InverseOf {
            forward: Box::new(delta.clone()),
            arg: Box::new(Expr::X),
        };
        let a = jet_exact(&closed, &q(0, 1), 7).unwrap();
        let b = jet_exact(&numeric, &q(0, 1), 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[1], q(1, 2));
        let x = Float::with_val(200, 3);
        let va = eval_float(&closed, &x);
        let vb = eval_float(&numeric, &x);
        let back = eval_float(&delta, &va);
        assert!(Float::with_val(200, &va - &vb).abs() < Float::with_val(200, 1) >> 180);
        assert!(Float::with_val(200, &back - &x).abs() < Float::with_val(200, 1) >> 180);
    }

    #[test]
    fn float_jet_matches_exact() {
        let e = parse_expr("exp(x)*arctan(x) + sin(x)^2").unwrap();
        let ex = jet_exact(&e, &q(0, 1), 8).unwrap();
        let fl = jet_float(&e, &Float::with_val(128, 0), 8);
        for (a, b) in ex.iter().zip(&fl) {
            let d = Float::with_val(128, b - a).abs();
            assert!(d < Float::with_val(128, 1) >> 110);
        }
    }

    #[test]
    fn arctan_value_against_series() {
        // π/8 = arctan(1)/2
        let e = parse_expr("1/2*arctan(x)").unwrap();
        let v = eval_float(&e, &Float::with_val(64, 1));
        let expected = pi(64) / 8u32;
        assert_eq!(v, expected);
    }
}
