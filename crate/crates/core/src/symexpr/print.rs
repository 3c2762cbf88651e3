//! Canonical printing. The output re-parses to a structurally equal tree.

use std::fmt;

use super::expr::{BinaryOp, Expr, UnaryOp};

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(_) | Expr::Var(_) => PREC_ATOM,
        Expr::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Expr::Unary(_, _) => PREC_ATOM,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => PREC_ADD,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => PREC_MUL,
        Expr::Binary(BinaryOp::Pow, _, _) => PREC_POW,
    }
}

fn is_neg(e: &Expr) -> bool {
    matches!(e, Expr::Unary(UnaryOp::Neg, _))
}

pub(crate) fn format_number(c: f64) -> String {
    let magnitude = c.abs();
    let body = if magnitude.fract() == 0.0 && magnitude < 1e15 {
        format!("{}", magnitude as i64)
    } else {
        // shortest representation that round-trips
        format!("{:?}", magnitude)
    };
    if c < 0.0 {
        format!("(-{body})")
    } else {
        body
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => f.write_str(&format_number(*c)),
            Expr::Var(v) => f.write_str(v),
            Expr::Unary(UnaryOp::Neg, a) => {
                // "-2" would read back as a negative literal
                let parens = precedence(a) < PREC_NEG || is_neg(a) || matches!(**a, Expr::Const(_));
                f.write_str("-")?;
                write_child(f, a, parens)
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(BinaryOp::Pow, base, exponent) => {
                write_child(f, base, precedence(base) <= PREC_POW)?;
                f.write_str("^")?;
                write_child(f, exponent, precedence(exponent) < PREC_NEG || is_neg(exponent))
            }
            Expr::Binary(op, lhs, rhs) => {
                let p = precedence(self);
                write_child(f, lhs, precedence(lhs) < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, rhs, precedence(rhs) <= p || is_neg(rhs))
            }
        }
    }
}
