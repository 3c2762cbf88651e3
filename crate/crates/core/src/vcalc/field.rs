use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symexpr::{simplify, sum, EvalError, Expr};

/// A vector field `X = Σ X_i ∂/∂x_i` with symbolic components.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Expr>,
    vars: Vec<String>,
}

impl VectorField {
    pub fn new(components: Vec<Expr>, vars: Vec<String>) -> Result<VectorField> {
        if components.len() != vars.len() {
            return Err(Error::InvalidField(format!(
                "{} components for {} variables",
                components.len(),
                vars.len()
            )));
        }
        for (i, c) in components.iter().enumerate() {
            if let Some(v) = c.free_vars().into_iter().find(|v| !vars.contains(v)) {
                return Err(Error::InvalidField(format!(
                    "component {i} uses `{v}`, which is not a coordinate"
                )));
            }
        }
        Ok(VectorField { components, vars })
    }

    pub fn zero(vars: Vec<String>) -> VectorField {
        VectorField {
            components: vec![Expr::zero(); vars.len()],
            vars,
        }
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    pub fn eval_at(&self, values: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.components.iter().map(|c| c.eval_at(&self.vars, values)).collect()
    }

    /// Componentwise product with a scalar function, simplified.
    pub fn scaled(&self, factor: &Expr) -> Result<VectorField> {
        let components = self.components.iter().map(|c| simplify(&(factor * c))).collect();
        VectorField::new(components, self.vars.clone())
    }

    pub fn jacobian(&self) -> ExprMatrix {
        jacobian_matrix(&self.components, &self.vars)
    }
}

/// A rectangular grid of expressions with labelled rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMatrix {
    entries: Vec<Vec<Expr>>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl ExprMatrix {
    pub fn new(entries: Vec<Vec<Expr>>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<ExprMatrix> {
        if entries.len() != row_labels.len() {
            return Err(Error::InvalidField(format!(
                "{} rows but {} row labels",
                entries.len(),
                row_labels.len()
            )));
        }
        if let Some(row) = entries.iter().find(|r| r.len() != col_labels.len()) {
            return Err(Error::InvalidField(format!(
                "row of length {} in a matrix with {} columns",
                row.len(),
                col_labels.len()
            )));
        }
        Ok(ExprMatrix {
            entries,
            row_labels,
            col_labels,
        })
    }

    /// Unlabelled square or rectangular matrix; rows and columns are numbered.
    pub fn from_rows(entries: Vec<Vec<Expr>>) -> Result<ExprMatrix> {
        let cols = entries.first().map_or(0, Vec::len);
        let row_labels = (0..entries.len()).map(|i| i.to_string()).collect();
        let col_labels = (0..cols).map(|j| j.to_string()).collect();
        ExprMatrix::new(entries, row_labels, col_labels)
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i][j]
    }

    pub fn row(&self, i: usize) -> &[Expr] {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[Vec<Expr>] {
        &self.entries
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn eval_at(&self, vars: &[String], values: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        let mut m = DMatrix::zeros(self.rows(), self.cols());
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = e.eval_at(vars, values)?;
            }
        }
        Ok(m)
    }

    /// Matrix-vector product with symbolic entries.
    pub fn apply(&self, v: &[Expr]) -> Vec<Expr> {
        self.entries
            .iter()
            .map(|row| sum(row.iter().zip(v).map(|(a, b)| a * b)))
            .collect()
    }
}

/// Entry `(i, j)` is `∂ fields[i] / ∂ vars[j]`.
pub fn jacobian_matrix(fields: &[Expr], vars: &[String]) -> ExprMatrix {
    let entries = fields
        .iter()
        .map(|f| vars.iter().map(|v| f.diff(v)).collect())
        .collect();
    let row_labels = fields.iter().map(ToString::to_string).collect();
    ExprMatrix {
        entries,
        row_labels,
        col_labels: vars.to_vec(),
    }
}
