use std::sync::Arc;

use thiserror::Error;

use super::expr::{BinaryOp, Expr, UnaryOp};
use crate::error::{Error, Result};

/// Magnitude below which a denominator counts as a pole.
pub const MACHINE_ZERO: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{function} undefined at {argument}")]
    DomainError { function: &'static str, argument: f64 },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

/// A point of the phase space with named coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    vars: Arc<[String]>,
    coords: Vec<f64>,
}

impl Point {
    pub fn new(vars: impl Into<Arc<[String]>>, coords: Vec<f64>) -> Result<Point> {
        let vars = vars.into();
        if vars.len() != coords.len() {
            return Err(Error::InvalidPoint(format!(
                "{} coordinates for {} variables",
                coords.len(),
                vars.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {c}")));
        }
        Ok(Point { vars, coords })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn shared_vars(&self) -> Arc<[String]> {
        Arc::clone(&self.vars)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Same variables, different coordinates.
    pub fn with_coords(&self, coords: Vec<f64>) -> Result<Point> {
        Point::new(Arc::clone(&self.vars), coords)
    }
}

fn guard_denominator(d: f64) -> Result<f64, EvalError> {
    if d.abs() < MACHINE_ZERO {
        Err(EvalError::DivisionByZero)
    } else {
        Ok(d)
    }
}

impl Expr {
    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        self.eval_at(p.vars(), p.coords())
    }

    /// Evaluates with `vars[i]` bound to `values[i]`.
    pub fn eval_at(&self, vars: &[String], values: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(name) => vars
                .iter()
                .position(|v| **v == **name)
                .and_then(|i| values.get(i).copied())
                .ok_or_else(|| EvalError::UnboundVariable(name.to_string())),
            Expr::Unary(op, a) => {
                let x = a.eval_at(vars, values)?;
                match op {
                    UnaryOp::Neg => Ok(-x),
                    UnaryOp::Sin => Ok(x.sin()),
                    UnaryOp::Cos => Ok(x.cos()),
                    UnaryOp::Exp => Ok(x.exp()),
                    UnaryOp::Ln => {
                        if x <= 0.0 {
                            Err(EvalError::DomainError {
                                function: "ln",
                                argument: x,
                            })
                        } else {
                            Ok(x.ln())
                        }
                    }
                    UnaryOp::Sqrt => {
                        if x < 0.0 {
                            Err(EvalError::DomainError {
                                function: "sqrt",
                                argument: x,
                            })
                        } else {
                            Ok(x.sqrt())
                        }
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval_at(vars, values)?;
                let y = b.eval_at(vars, values)?;
                match op {
                    BinaryOp::Add => Ok(x + y),
                    BinaryOp::Sub => Ok(x - y),
                    BinaryOp::Mul => Ok(x * y),
                    BinaryOp::Div => Ok(x / guard_denominator(y)?),
                    BinaryOp::Pow => eval_pow(x, y),
                }
            }
        }
    }
}

fn eval_pow(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if exponent < 0.0 {
        guard_denominator(base)?;
    }
    if exponent.fract() == 0.0 && exponent.abs() <= f64::from(i32::MAX) {
        return Ok(base.powi(exponent as i32));
    }
    let value = base.powf(exponent);
    if value.is_nan() {
        Err(EvalError::DomainError {
            function: "pow",
            argument: base,
        })
    } else {
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn vars() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    fn eval(s: &str, x: [f64; 2]) -> Result<f64, EvalError> {
        let p = Point::new(vars(), x.to_vec()).unwrap();
        parse_expr(s, &vars()).unwrap().eval(&p)
    }

    #[test]
    fn polynomial() {
        assert_eq!(eval("x1^2 + 3*x2", [2.0, 1.0]), Ok(7.0));
    }

    #[test]
    fn quotient_with_zero_numerator() {
        assert_eq!(eval("x2/x1", [1.0, 0.0]), Ok(0.0));
    }

    #[test]
    fn pole_is_reported() {
        assert_eq!(eval("1/x1", [0.0, 1.0]), Err(EvalError::DivisionByZero));
        assert_eq!(eval("x1^(-2)", [0.0, 1.0]), Err(EvalError::DivisionByZero));
        // small but admissible denominators pass
        assert!(eval("1/x1", [1e-200, 1.0]).is_ok());
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            eval("ln(x1)", [-1.0, 0.0]),
            Err(EvalError::DomainError { function: "ln", .. })
        ));
        assert!(matches!(
            eval("sqrt(x2)", [1.0, -0.5]),
            Err(EvalError::DomainError { function: "sqrt", .. })
        ));
        assert!(matches!(
            eval("x2^0.5", [1.0, -0.5]),
            Err(EvalError::DomainError { function: "pow", .. })
        ));
    }

    #[test]
    fn negative_base_integer_power() {
        assert_eq!(eval("x1^3", [-2.0, 0.0]), Ok(-8.0));
    }

    #[test]
    fn unbound_variable() {
        let p = Point::new(vec!["x1".to_string()], vec![1.0]).unwrap();
        let e = parse_expr("x1 + x2", &vars()).unwrap();
        assert_eq!(e.eval(&p), Err(EvalError::UnboundVariable("x2".into())));
    }

    #[test]
    fn point_invariants() {
        assert!(Point::new(vars(), vec![1.0]).is_err());
        assert!(Point::new(vars(), vec![1.0, f64::NAN]).is_err());
    }
}
