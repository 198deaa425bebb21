mod analysis;
mod diffeo;
mod eval;
mod expr;
mod function;
mod interval;
mod value;

pub use analysis::{limit_at_end, limit_at_infinity, sample_grid, Limit};
pub use diffeo::{conjugate, normalize_quadratic, quadratic_normal_symbol, Diffeomorphism, Inverse, QuadraticNormalForm};
pub use eval::{eval_exact, eval_float, eval_with_derivative, jet_exact, jet_float, pi, solve_inverse};
pub use expr::{parse_expr, Expr};
pub use function::{
    check_invariance, check_maps_into, parse_symbol, AnalyticSymbol, Body, InvarianceCertificate, RealFunction, GUARD_BITS, INVARIANCE_SAMPLES,
};
pub use interval::Interval;
pub use value::{fmt_float, Value};
