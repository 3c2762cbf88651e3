use nalgebra::DMatrix;

use crate::error::Result;
use crate::vcalc::{ExprMatrix, VectorField};

/// A vector field known through pointwise evaluation.
pub trait PointField {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// `D Y(x)`; central differences unless the implementor knows better.
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        fd_jacobian(self, x)
    }
}

/// A scalar function known through pointwise evaluation.
pub trait ScalarField {
    fn eval(&self, x: &[f64]) -> Result<f64>;
}

impl<F> ScalarField for F
where
    F: Fn(&[f64]) -> Result<f64>,
{
    fn eval(&self, x: &[f64]) -> Result<f64> {
        self(x)
    }
}

/// Central-difference step used throughout: `1e-6 · (1 + |x_j|)`.
pub fn fd_step(xj: f64) -> f64 {
    1e-6 * (1.0 + xj.abs())
}

pub fn fd_jacobian<F: PointField + ?Sized>(field: &F, x: &[f64]) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut jac = DMatrix::zeros(field.dim(), n);
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = fd_step(x[j]);
        probe[j] = x[j] + h;
        let plus = field.eval(&probe)?;
        probe[j] = x[j] - h;
        let minus = field.eval(&probe)?;
        probe[j] = x[j];
        for i in 0..field.dim() {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// [`PointField`] backed by symbolic components and their exact Jacobian.
#[derive(Debug, Clone)]
pub struct SymbolicField {
    field: VectorField,
    jacobian: ExprMatrix,
}

impl SymbolicField {
    pub fn new(field: VectorField) -> SymbolicField {
        let jacobian = field.jacobian();
        SymbolicField { field, jacobian }
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }
}

impl PointField for SymbolicField {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.field.eval_at(x)?)
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.jacobian.eval_at(self.field.vars(), x)?)
    }
}

/// Pointwise `Y + s·Z`.
pub struct Perturbed<'a> {
    pub base: &'a dyn PointField,
    pub perturbation: &'a dyn PointField,
    pub scale: f64,
}

impl PointField for Perturbed<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let a = self.base.eval(x)?;
        let b = self.perturbation.eval(x)?;
        Ok(a.iter().zip(&b).map(|(a, b)| a + self.scale * b).collect())
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.base.jacobian(x)? + self.perturbation.jacobian(x)? * self.scale)
    }
}
