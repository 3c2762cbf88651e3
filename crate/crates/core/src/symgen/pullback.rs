use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::field::PointField;
use super::kernel::KernelElement;
use crate::error::{Error, Result};
use crate::linearize::LinearizingChart;
use crate::symexpr::{simplify, Expr};
use crate::vcalc::{det_symbolic, ExprMatrix, VectorField};

/// Largest dimension for which [`PulledBackField::symbolic`] builds the
/// adjugate form.
pub const SYMBOLIC_LIMIT: usize = 4;

type Lu = nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>;

/// `Y = DΦ⁻¹ · (Y~ ∘ Φ)`, solved pointwise.
#[derive(Debug, Clone)]
pub struct PulledBackField {
    chart: LinearizingChart,
    kernel: VectorField,
    kernel_jacobian: ExprMatrix,
    delta_det: f64,
}

pub fn pullback_field(chart: &LinearizingChart, kernel: &KernelElement) -> Result<PulledBackField> {
    PulledBackField::new(chart.clone(), kernel.field.clone(), 1e-8)
}

impl PulledBackField {
    pub fn new(chart: LinearizingChart, kernel: VectorField, delta_det: f64) -> Result<PulledBackField> {
        if kernel.vars() != chart.target_vars() {
            return Err(Error::VariableMismatch {
                left: kernel.vars().to_vec(),
                right: chart.target_vars().to_vec(),
            });
        }
        let kernel_jacobian = kernel.jacobian();
        Ok(PulledBackField {
            chart,
            kernel,
            kernel_jacobian,
            delta_det,
        })
    }

    pub fn with_delta_det(mut self, delta_det: f64) -> PulledBackField {
        self.delta_det = delta_det;
        self
    }

    pub fn chart(&self) -> &LinearizingChart {
        &self.chart
    }

    pub fn kernel(&self) -> &VectorField {
        &self.kernel
    }

    /// `DΦ(x)`, its LU factors and `Φ(x)`.
    fn factored(&self, x: &[f64]) -> Result<(DMatrix<f64>, Lu, Vec<f64>)> {
        let jac = self.chart.jacobian_at(x)?;
        let lu = jac.clone().lu();
        let det = lu.determinant();
        if !(det.abs() > self.delta_det) {
            return Err(Error::SingularJacobian { det });
        }
        let u = self.chart.apply_at(x)?;
        Ok((jac, lu, u))
    }

    /// Components as expressions in `x`, `adj(DΦ) · (Y~ ∘ Φ) / det DΦ`.
    /// `None` above [`SYMBOLIC_LIMIT`].
    pub fn symbolic(&self) -> Option<Result<Vec<Expr>>> {
        let n = self.chart.dim();
        if n > SYMBOLIC_LIMIT {
            return None;
        }
        Some(self.symbolic_inner())
    }

    fn symbolic_inner(&self) -> Result<Vec<Expr>> {
        let n = self.chart.dim();
        let bindings: HashMap<String, Expr> = self
            .chart
            .target_vars()
            .iter()
            .cloned()
            .zip(self.chart.components().iter().cloned())
            .collect();
        let ybar: Vec<Expr> = self
            .kernel
            .components()
            .iter()
            .map(|c| simplify(&c.substitute(&bindings)))
            .collect();
        let jac = self.chart.jacobian().entries();
        let det = self.chart.jacobian_det().clone();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut terms = Vec::with_capacity(n);
            for (j, yj) in ybar.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                // adj(J)_ij = (-1)^(i+j) · minor of J without row j and column i
                let minor_rows: Vec<Vec<Expr>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| jac[r][c].clone()).collect())
                    .collect();
                let minor = if n == 1 {
                    Expr::one()
                } else {
                    det_symbolic(&ExprMatrix::from_rows(minor_rows)?)?
                };
                let signed = if (i + j) % 2 == 0 { minor } else { -minor };
                terms.push(signed * yj.clone());
            }
            out.push(simplify(&(crate::symexpr::sum(terms) / det.clone())));
        }
        Ok(out)
    }
}

impl PointField for PulledBackField {
    fn dim(&self) -> usize {
        self.chart.dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (_, lu, u) = self.factored(x)?;
        let ybar = DVector::from_vec(self.kernel.eval_at(&u)?);
        let y = lu.solve(&ybar).ok_or(Error::SingularJacobian { det: 0.0 })?;
        Ok(y.iter().copied().collect())
    }

    /// Differentiating `DΦ·Y = Y~∘Φ` gives
    /// `DY = DΦ⁻¹ [ (DY~∘Φ)·DΦ − S ]` with `S_ij = Σ_k ∂²Φ_i/∂x_j∂x_k Y_k`.
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let (jac, lu, u) = self.factored(x)?;
        let ybar = DVector::from_vec(self.kernel.eval_at(&u)?);
        let y = lu.solve(&ybar).ok_or(Error::SingularJacobian { det: 0.0 })?;
        let s = self.chart.hessian_contract_at(x, y.as_slice())?;
        let dk = self.kernel_jacobian.eval_at(self.kernel.vars(), &u)?;
        let rhs = dk * jac - s;
        lu.solve(&rhs).ok_or(Error::SingularJacobian { det: 0.0 })
    }
}
