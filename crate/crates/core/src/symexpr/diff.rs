use super::expr::{BinaryOp, Expr, UnaryOp};
use super::simplify::simplify;

impl Expr {
    /// Exact partial derivative with respect to `v`, simplified.
    pub fn diff(&self, v: &str) -> Expr {
        simplify(&derivative(self, v))
    }
}

pub fn diff_expr(e: &Expr, v: &str) -> Expr {
    e.diff(v)
}

pub fn grad(e: &Expr, vars: &[String]) -> Vec<Expr> {
    vars.iter().map(|v| e.diff(v)).collect()
}

// Subtrees that do not mention `v` differentiate to a literal zero, which
// keeps the product and quotient rules from producing dead branches.
fn derivative(e: &Expr, v: &str) -> Expr {
    if !e.depends_on(v) {
        return Expr::zero();
    }
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Var(_) => Expr::one(),
        Expr::Unary(op, a) => {
            let a = (**a).clone();
            let da = simplify(&derivative(&a, v));
            let outer = match op {
                UnaryOp::Neg => return simplify(&-da),
                UnaryOp::Sin => Expr::cos(a),
                UnaryOp::Cos => -Expr::sin(a),
                UnaryOp::Exp => Expr::exp(a),
                UnaryOp::Ln => return simplify(&(da / a)),
                UnaryOp::Sqrt => {
                    return simplify(&(da / (Expr::constant(2.0) * Expr::sqrt(a))));
                }
            };
            simplify(&(outer * da))
        }
        Expr::Binary(op, a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let da_dep = a.depends_on(v);
            let db_dep = b.depends_on(v);
            let da = simplify(&derivative(&a, v));
            let db = simplify(&derivative(&b, v));
            let raw = match op {
                BinaryOp::Add => da + db,
                BinaryOp::Sub => da - db,
                BinaryOp::Mul => match (da_dep, db_dep) {
                    (true, false) => da * b,
                    (false, true) => a * db,
                    _ => da * b + a * db,
                },
                BinaryOp::Div => match (da_dep, db_dep) {
                    (true, false) => da / b,
                    (false, true) => -((a * db) / Expr::powi(b, 2)),
                    _ => (da * b.clone() - a * db) / Expr::powi(b, 2),
                },
                BinaryOp::Pow => pow_derivative(a, b, da, db, da_dep, db_dep),
            };
            simplify(&raw)
        }
    }
}

fn pow_derivative(base: Expr, exponent: Expr, db: Expr, de: Expr, base_dep: bool, exp_dep: bool) -> Expr {
    match (base_dep, exp_dep) {
        (true, false) => {
            let lowered = match exponent.as_const() {
                Some(c) => Expr::constant(c - 1.0),
                None => exponent.clone() - Expr::one(),
            };
            exponent * Expr::pow(base, lowered) * db
        }
        (false, true) => Expr::pow(base.clone(), exponent) * Expr::ln(base) * de,
        _ => {
            let power = Expr::pow(base.clone(), exponent.clone());
            power * (de * Expr::ln(base.clone()) + exponent * db / base)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{eval::Point, parse_expr};

    fn vars() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    fn p(text: &str) -> Expr {
        parse_expr(text, &vars()).unwrap()
    }

    fn central_difference(e: &Expr, var: usize, x: &[f64]) -> f64 {
        let h = 1e-6 * (1.0 + x[var].abs());
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[var] += h;
        minus[var] -= h;
        let vs = vars();
        (e.eval_at(&vs, &plus).unwrap() - e.eval_at(&vs, &minus).unwrap()) / (2.0 * h)
    }

    #[test]
    fn power_rule() {
        assert_eq!(p("x1^2").diff("x1"), p("2*x1"));
        assert_eq!(p("x1^3").diff("x1"), p("3*x1^2"));
    }

    #[test]
    fn quotient_in_numerator_variable() {
        assert_eq!(p("x2/x1").diff("x2"), p("1/x1"));
    }

    #[test]
    fn quotient_in_denominator_variable() {
        assert_eq!(p("x2/x1").diff("x1"), p("-(x2/x1^2)"));
    }

    #[test]
    fn exponential_matches_finite_difference() {
        let e = p("exp(x1*x2)");
        let d = e.diff("x1");
        let x = [0.3, 0.7];
        let exact = d.eval(&Point::new(vars(), x.to_vec()).unwrap()).unwrap();
        let fd = central_difference(&e, 0, &x);
        assert!((exact - fd).abs() <= 1e-6 * fd.abs(), "{exact} vs {fd}");
    }

    #[test]
    fn gradient() {
        assert_eq!(grad(&p("x1*x2"), &vars()), vec![p("x2"), p("x1")]);
        assert_eq!(grad(&p("5"), &vars()), vec![Expr::zero(), Expr::zero()]);
        assert_eq!(grad(&p("x2/x1"), &vars()), vec![p("-(x2/x1^2)"), p("1/x1")]);
    }

    #[test]
    fn transcendental_rules_against_finite_differences() {
        let x = [0.4, 1.3];
        for text in [
            "sin(x1)*cos(x2)",
            "ln(x1 + x2^2)",
            "sqrt(x1*x2 + 1)",
            "x1^x2",
            "2^(x1*x2)",
            "x2^(-1.5) - x1/x2",
            "-cos(x1)/exp(x2)",
        ] {
            let e = p(text);
            for var in 0..2 {
                let d = e.diff(&vars()[var]);
                let exact = d.eval_at(&vars(), &x).unwrap();
                let fd = central_difference(&e, var, &x);
                assert!(
                    (exact - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                    "{text} d/d{}: {exact} vs {fd}",
                    vars()[var]
                );
            }
        }
    }

    #[test]
    fn linearity_on_corpus() {
        let corpus = ["x1^2", "sin(x1*x2)", "x2/x1", "exp(x2) - x1", "sqrt(x1)*ln(x2)"];
        for a in corpus {
            for b in corpus {
                let sum = p(a) + p(b);
                let lhs = sum.diff("x1");
                let rhs = simplify(&(p(a).diff("x1") + p(b).diff("x1")));
                assert_eq!(lhs, rhs, "d({a} + {b})");
            }
        }
    }
}
