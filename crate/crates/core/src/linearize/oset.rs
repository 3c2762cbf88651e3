use crate::error::Result;
use crate::symexpr::{simplify, EvalError, Expr, Point, MACHINE_ZERO};
use crate::vcalc::{divergence, jacobian_matrix, nambu_bracket, IntegrableSystem};

/// The degeneracy product `div(X) · ∂(1/ν, C_1, …, C_{n-2}, H)/∂(x_1, …, x_n)`.
#[derive(Debug, Clone)]
pub struct OsetCondition {
    divergence: Expr,
    bracket: Expr,
    gradients: Vec<Vec<Expr>>,
    nu: Expr,
    vars: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsetValue {
    pub value: f64,
    /// `max(1, |div X| · Π_i ‖∇f_i‖)`, the Hadamard bound of the product.
    pub scale: f64,
}

impl OsetValue {
    pub fn is_degenerate(&self, delta: f64) -> bool {
        !(self.value.abs() > delta * self.scale)
    }
}

impl OsetCondition {
    pub fn new(sys: &IntegrableSystem) -> Result<OsetCondition> {
        let mut fs = vec![simplify(&(Expr::one() / sys.nu().clone()))];
        fs.extend(sys.integrals());
        let bracket = nambu_bracket(&fs, sys.vars())?;
        let gradients = jacobian_matrix(&fs, sys.vars()).entries().to_vec();
        Ok(OsetCondition {
            divergence: divergence(sys.field()),
            bracket,
            gradients,
            nu: sys.nu().clone(),
            vars: sys.vars().to_vec(),
        })
    }

    pub fn divergence(&self) -> &Expr {
        &self.divergence
    }

    pub fn bracket(&self) -> &Expr {
        &self.bracket
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<OsetValue, EvalError> {
        let nu = self.nu.eval_at(&self.vars, x)?;
        if nu.abs() < MACHINE_ZERO {
            return Err(EvalError::DivisionByZero);
        }
        let div = self.divergence.eval_at(&self.vars, x)?;
        let value = div * self.bracket.eval_at(&self.vars, x)?;
        let mut bound = div.abs();
        for row in &self.gradients {
            let mut sq = 0.0;
            for e in row {
                let v = e.eval_at(&self.vars, x)?;
                sq += v * v;
            }
            bound *= sq.sqrt();
        }
        Ok(OsetValue {
            value,
            scale: bound.max(1.0),
        })
    }
}

pub fn oset_value(sys: &IntegrableSystem, point: &Point) -> Result<f64> {
    Ok(OsetCondition::new(sys)?.evaluate(point.coords())?.value)
}
