//! Local rewriting: constant folding and the usual neutral/absorbing element
//! identities. There is no canonical polynomial form; the only reordering is
//! that numeric factors move to the left of a product.

use super::expr::{BinaryOp, Expr, UnaryOp};

const MAX_PASSES: usize = 8;

pub fn simplify(e: &Expr) -> Expr {
    let mut current = simplify_once(e);
    for _ in 0..MAX_PASSES {
        let next = simplify_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn finite(value: f64) -> Option<Expr> {
    value.is_finite().then(|| Expr::constant(value))
}

fn simplify_once(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Unary(op, a) => rewrite_unary(*op, simplify_once(a)),
        Expr::Binary(op, a, b) => rewrite_binary(*op, simplify_once(a), simplify_once(b)),
    }
}

fn rewrite_unary(op: UnaryOp, a: Expr) -> Expr {
    if let Some(c) = a.as_const() {
        let folded = match op {
            UnaryOp::Neg => Some(-c),
            UnaryOp::Sin => Some(c.sin()),
            UnaryOp::Cos => Some(c.cos()),
            UnaryOp::Exp => Some(c.exp()),
            UnaryOp::Ln => (c > 0.0).then(|| c.ln()),
            UnaryOp::Sqrt => (c >= 0.0).then(|| c.sqrt()),
        };
        if let Some(e) = folded.and_then(finite) {
            return e;
        }
    }
    if op == UnaryOp::Neg {
        if let Expr::Unary(UnaryOp::Neg, inner) = &a {
            return (**inner).clone();
        }
        if let Expr::Binary(BinaryOp::Sub, x, y) = &a {
            return Expr::binary(BinaryOp::Sub, (**y).clone(), (**x).clone());
        }
    }
    Expr::unary(op, a)
}

fn negated(e: &Expr) -> Option<&Expr> {
    match e {
        Expr::Unary(UnaryOp::Neg, inner) => Some(inner),
        _ => None,
    }
}

/// `(base, k)` for `base^k` with integer `k >= 1`, and `(e, 1)` for any other
/// non-constant `e`.
fn positive_power(e: &Expr) -> Option<(&Expr, i32)> {
    match e {
        Expr::Const(_) => None,
        Expr::Binary(BinaryOp::Pow, base, k) => match k.as_const() {
            Some(k) if k >= 1.0 && k.fract() == 0.0 && k < 1e6 => Some((base, k as i32)),
            _ => None,
        },
        _ => Some((e, 1)),
    }
}

fn rewrite_binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        let folded = match op {
            BinaryOp::Add => Some(x + y),
            BinaryOp::Sub => Some(x - y),
            BinaryOp::Mul => Some(x * y),
            BinaryOp::Div => (y != 0.0).then(|| x / y),
            BinaryOp::Pow => {
                let v = x.powf(y);
                (!v.is_nan() && !(x == 0.0 && y < 0.0)).then_some(v)
            }
        };
        if let Some(e) = folded.and_then(finite) {
            return e;
        }
    }
    match op {
        BinaryOp::Add => {
            if a.is_zero() {
                return b;
            }
            if b.is_zero() {
                return a;
            }
            if let Some(nb) = negated(&b) {
                return Expr::binary(BinaryOp::Sub, a, nb.clone());
            }
            if let Some(c) = b.as_const().filter(|c| *c < 0.0) {
                return Expr::binary(BinaryOp::Sub, a, Expr::constant(-c));
            }
            if let Some(na) = negated(&a) {
                return Expr::binary(BinaryOp::Sub, b, na.clone());
            }
        }
        BinaryOp::Sub => {
            if b.is_zero() {
                return a;
            }
            if a == b {
                return Expr::zero();
            }
            if a.is_zero() {
                return rewrite_unary(UnaryOp::Neg, b);
            }
            if let Some(nb) = negated(&b) {
                return Expr::binary(BinaryOp::Add, a, nb.clone());
            }
        }
        BinaryOp::Mul => {
            if a.is_zero() || b.is_zero() {
                return Expr::zero();
            }
            if a.is_one() {
                return b;
            }
            if b.is_one() {
                return a;
            }
            if a.is_const(-1.0) {
                return rewrite_unary(UnaryOp::Neg, b);
            }
            if b.is_const(-1.0) {
                return rewrite_unary(UnaryOp::Neg, a);
            }
            if let Some(na) = negated(&a) {
                return rewrite_unary(UnaryOp::Neg, Expr::binary(BinaryOp::Mul, na.clone(), b));
            }
            if let Some(nb) = negated(&b) {
                return rewrite_unary(UnaryOp::Neg, Expr::binary(BinaryOp::Mul, a, nb.clone()));
            }
            if b.as_const().is_some() {
                return rewrite_binary(BinaryOp::Mul, b, a);
            }
            if a == b {
                return Expr::powi(a, 2);
            }
            // e^j * e^k -> e^(j+k) for positive integer exponents
            if let (Some((ba, ja)), Some((bb, jb))) = (positive_power(&a), positive_power(&b)) {
                if ba == bb {
                    return Expr::powi(ba.clone(), ja + jb);
                }
            }
            // c1 * (c2 * e) -> (c1 c2) * e
            if let (Some(c1), Expr::Binary(BinaryOp::Mul, inner, rest)) = (a.as_const(), &b) {
                if let Some(c2) = inner.as_const() {
                    if let Some(c) = finite(c1 * c2) {
                        return rewrite_binary(BinaryOp::Mul, c, (**rest).clone());
                    }
                }
            }
        }
        BinaryOp::Div => {
            if b.is_one() {
                return a;
            }
            if a.is_zero() && !b.is_zero() {
                return Expr::zero();
            }
            if a == b && !a.is_zero() {
                return Expr::one();
            }
            if b.is_const(-1.0) {
                return rewrite_unary(UnaryOp::Neg, a);
            }
            if let Some(na) = negated(&a) {
                return rewrite_unary(UnaryOp::Neg, Expr::binary(BinaryOp::Div, na.clone(), b));
            }
            if let Some(nb) = negated(&b) {
                return rewrite_unary(UnaryOp::Neg, Expr::binary(BinaryOp::Div, a, nb.clone()));
            }
        }
        BinaryOp::Pow => {
            if b.is_zero() {
                return Expr::one();
            }
            if b.is_one() {
                return a;
            }
            if a.is_one() {
                return Expr::one();
            }
            // (e^m)^k -> e^(mk) for integers m, k
            if let (Expr::Binary(BinaryOp::Pow, base, inner), Some(k)) = (&a, b.as_const()) {
                if let Some(m) = inner.as_const() {
                    if m.fract() == 0.0 && k.fract() == 0.0 {
                        return rewrite_binary(BinaryOp::Pow, (**base).clone(), Expr::constant(m * k));
                    }
                }
            }
        }
    }
    Expr::binary(op, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn vars() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    fn s(text: &str) -> Expr {
        simplify(&parse_expr(text, &vars()).unwrap())
    }

    fn p(text: &str) -> Expr {
        parse_expr(text, &vars()).unwrap()
    }

    #[test]
    fn self_difference_vanishes() {
        assert_eq!(s("x1 - x1"), Expr::zero());
        assert_eq!(s("sin(x1*x2) - sin(x1*x2)"), Expr::zero());
    }

    #[test]
    fn neutral_elements() {
        assert_eq!(s("1*(x1+0)"), p("x1"));
        assert_eq!(s("x1^1"), p("x1"));
        assert_eq!(s("x2^0"), Expr::one());
        assert_eq!(s("0*sin(x1)"), Expr::zero());
        assert_eq!(s("x1/1"), p("x1"));
        assert_eq!(s("0 - x1"), p("-x1"));
    }

    #[test]
    fn constant_folding() {
        assert_eq!(s("(2*3)*x1"), p("6*x1"));
        assert_eq!(s("x1*2*3"), p("6*x1"));
        assert_eq!(s("2^3 - 1"), Expr::constant(7.0));
        assert_eq!(s("ln(1)"), Expr::zero());
    }

    #[test]
    fn undefined_constants_are_left_alone() {
        assert_eq!(s("1/0"), p("1/0"));
        assert_eq!(s("ln(-1)"), p("ln(-1)"));
        assert_eq!(s("0^(-1)"), p("0^(-1)"));
    }

    #[test]
    fn signs() {
        assert_eq!(s("-(-x1)"), p("x1"));
        assert_eq!(s("x1 + -x2"), p("x1 - x2"));
        assert_eq!(s("x1 - -x2"), p("x1 + x2"));
        assert_eq!(s("(-1)*x2"), p("-x2"));
        assert_eq!(s("(-x1)*x2"), p("-(x1*x2)"));
    }

    #[test]
    fn integer_power_of_power() {
        assert_eq!(s("(x1^2)^(-3)"), p("x1^(-6)"));
    }
}
