//! Symbolic expressions: grammar, parser, evaluator, simplifier and exact
//! differentiation.

mod diff;
mod eval;
mod expr;
mod parse;
mod print;
mod simplify;

pub use diff::{diff_expr, grad};
pub use eval::{EvalError, Point, MACHINE_ZERO};
pub use expr::{BinaryOp, Expr, UnaryOp};
pub use parse::{parse_expr, ParseError, ParseErrorKind};
pub use simplify::simplify;

/// Evaluates an expression at a point.
pub fn eval_expr(e: &Expr, p: &Point) -> Result<f64, EvalError> {
    e.eval(p)
}

/// Sum of terms, skipping literal zeros. Terms are folded left in order.
pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
    let mut acc: Option<Expr> = None;
    for t in terms {
        let t = simplify(&t);
        if t.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => t,
            Some(a) => simplify(&(a + t)),
        });
    }
    acc.unwrap_or_else(Expr::zero)
}
