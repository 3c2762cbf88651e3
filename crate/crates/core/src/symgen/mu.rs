use super::field::{PointField, ScalarField};
use crate::error::{Error, Result};
use crate::symexpr::{grad, Expr};
use crate::vcalc::{divergence, IntegrableSystem};

/// `μ(x) = −⟨∇div X, Y⟩ / div X`, the factor in `[X, Y] = μ X`.
#[derive(Debug, Clone)]
pub struct MuFactor {
    divergence: Expr,
    grad_divergence: Vec<Expr>,
    vars: Vec<String>,
    delta: f64,
}

impl MuFactor {
    pub fn new(sys: &IntegrableSystem) -> MuFactor {
        let div = divergence(sys.field());
        MuFactor {
            grad_divergence: grad(&div, sys.vars()),
            divergence: div,
            vars: sys.vars().to_vec(),
            delta: sys.tolerances().oset,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> MuFactor {
        self.delta = delta;
        self
    }

    pub fn divergence(&self) -> &Expr {
        &self.divergence
    }

    /// `μ` at `x` given `Y(x)`.
    pub fn eval_with(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let d = self.divergence.eval_at(&self.vars, x)?;
        if !(d.abs() > self.delta) {
            return Err(Error::DegeneratePoint { value: d });
        }
        let mut dot = 0.0;
        for (g, yi) in self.grad_divergence.iter().zip(y) {
            if !g.is_zero() {
                dot += g.eval_at(&self.vars, x)? * yi;
            }
        }
        Ok(-dot / d)
    }

    pub fn bind<'a>(&'a self, y: &'a dyn PointField) -> BoundMu<'a> {
        BoundMu { factor: self, y }
    }
}

/// [`MuFactor`] paired with the field it is computed for.
pub struct BoundMu<'a> {
    factor: &'a MuFactor,
    y: &'a dyn PointField,
}

impl ScalarField for BoundMu<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.factor.eval_with(x, &self.y.eval(x)?)
    }
}

pub fn mu_factor(sys: &IntegrableSystem) -> MuFactor {
    MuFactor::new(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;
    use crate::symgen::field::SymbolicField;
    use crate::vcalc::{DomainBox, VectorField};

    fn planar(x: [&str; 2], nu: &str) -> IntegrableSystem {
        let vars: Vec<String> = vec!["x1".into(), "x2".into()];
        let p = |s: &str| parse_expr(s, &vars).unwrap();
        IntegrableSystem::new(
            VectorField::new(vec![p(x[0]), p(x[1])], vars.clone()).unwrap(),
            vec![],
            p("x2/x1"),
            p(nu),
            DomainBox::new(vec![(0.25, 0.75), (-1.0, 1.0)]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn quadratic_factor_is_constant() {
        let sys = planar(["x1^2", "x1*x2"], "x1^3");
        let mu = mu_factor(&sys);
        let vars = sys.vars().to_vec();
        let y = SymbolicField::new(
            VectorField::new(
                vec![
                    parse_expr("-x1/3", &vars).unwrap(),
                    parse_expr("-4*x2/3", &vars).unwrap(),
                ],
                vars,
            )
            .unwrap(),
        );
        let bound = mu.bind(&y);
        for x in [[0.3, 0.1], [0.7, -0.9]] {
            assert!((bound.eval(&x).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn vanishing_divergence_is_degenerate() {
        let sys = planar(["-x2", "x1"], "1");
        let mu = mu_factor(&sys);
        assert!(matches!(
            mu.eval_with(&[0.5, 0.5], &[1.0, 0.0]),
            Err(Error::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn closures_are_scalar_fields() {
        let f = |x: &[f64]| -> Result<f64> { Ok(x[0] * 2.0) };
        assert_eq!(ScalarField::eval(&f, &[1.5]).unwrap(), 3.0);
    }
}
