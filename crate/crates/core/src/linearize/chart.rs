use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symexpr::{simplify, EvalError, Expr, Point};
use crate::vcalc::{det_numeric, det_symbolic, jacobian_matrix, ExprMatrix, IntegrableSystem};

/// The change of variables `u_1 = 1/ν`, `u_{k+1} = C_k/ν`, `u_n = H/ν`.
#[derive(Debug, Clone)]
pub struct LinearizingChart {
    components: Vec<Expr>,
    jacobian: ExprMatrix,
    jacobian_det: Expr,
    /// `hessians[i][j][k] = ∂²Φ_i / ∂x_j ∂x_k`.
    hessians: Vec<Vec<Vec<Expr>>>,
    source_vars: Vec<String>,
    target_vars: Vec<String>,
}

pub fn target_variables(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("u{i}")).collect()
}

pub fn build_chart(sys: &IntegrableSystem) -> Result<LinearizingChart> {
    let nu = sys.nu();
    let mut components = vec![simplify(&(Expr::one() / nu.clone()))];
    components.extend(sys.integrals().into_iter().map(|f| simplify(&(f / nu.clone()))));
    LinearizingChart::from_components(components, sys.vars().to_vec())
}

impl LinearizingChart {
    pub fn from_components(components: Vec<Expr>, source_vars: Vec<String>) -> Result<LinearizingChart> {
        if components.len() != source_vars.len() {
            return Err(Error::ArityMismatch {
                expected: source_vars.len(),
                got: components.len(),
            });
        }
        let jacobian = jacobian_matrix(&components, &source_vars);
        let jacobian_det = det_symbolic(&jacobian)?;
        let hessians = jacobian
            .entries()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|entry| source_vars.iter().map(|v| entry.diff(v)).collect())
                    .collect()
            })
            .collect();
        let target_vars = target_variables(source_vars.len());
        Ok(LinearizingChart {
            components,
            jacobian,
            jacobian_det,
            hessians,
            source_vars,
            target_vars,
        })
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn jacobian(&self) -> &ExprMatrix {
        &self.jacobian
    }

    pub fn jacobian_det(&self) -> &Expr {
        &self.jacobian_det
    }

    pub fn hessians(&self) -> &[Vec<Vec<Expr>>] {
        &self.hessians
    }

    pub fn source_vars(&self) -> &[String] {
        &self.source_vars
    }

    pub fn target_vars(&self) -> &[String] {
        &self.target_vars
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn apply_at(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.components
            .iter()
            .map(|c| c.eval_at(&self.source_vars, x))
            .collect()
    }

    pub fn jacobian_at(&self, x: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        self.jacobian.eval_at(&self.source_vars, x)
    }

    pub fn jacobian_det_at(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.jacobian_det.eval_at(&self.source_vars, x)
    }

    /// Second derivatives contracted with `y`: `S_ij = Σ_k ∂²Φ_i/∂x_j∂x_k y_k`.
    pub fn hessian_contract_at(&self, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        let n = self.dim();
        let mut s = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for (k, yk) in y.iter().enumerate() {
                    let h = &self.hessians[i][j][k];
                    if !h.is_zero() {
                        acc += h.eval_at(&self.source_vars, x)? * yk;
                    }
                }
                s[(i, j)] = acc;
            }
        }
        Ok(s)
    }
}

pub fn chart_apply(chart: &LinearizingChart, x: &Point) -> Result<Point> {
    let u = chart.apply_at(x.coords())?;
    Point::new(chart.target_vars().to_vec(), u)
}

#[derive(Debug, Clone, Copy)]
pub struct InvertOptions {
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Iterates with `|det DΦ|` at or below this are singular.
    pub delta_det: f64,
    pub tolerance: f64,
}

impl Default for InvertOptions {
    fn default() -> Self {
        InvertOptions {
            max_iterations: 50,
            max_halvings: 20,
            delta_det: 1e-8,
            tolerance: 1e-12,
        }
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn residual(chart: &LinearizingChart, x: &[f64], u: &[f64]) -> Option<Vec<f64>> {
    let phi = chart.apply_at(x).ok()?;
    let r: Vec<f64> = phi.iter().zip(u).map(|(a, b)| a - b).collect();
    r.iter().all(|v| v.is_finite()).then_some(r)
}

/// Solves `Φ(x) = u` by damped Newton iteration from `x0`.
pub fn chart_invert(chart: &LinearizingChart, u: &Point, x0: &Point) -> Result<Point> {
    chart_invert_with(chart, u, x0, &InvertOptions::default())
}

pub fn chart_invert_with(chart: &LinearizingChart, u: &Point, x0: &Point, opts: &InvertOptions) -> Result<Point> {
    let target = u.coords();
    let tol = opts.tolerance * (1.0 + sup_norm(target));
    let mut x = x0.coords().to_vec();
    let mut r = residual(chart, &x, target).ok_or(Error::NoConvergence {
        iterations: 0,
        residual: f64::INFINITY,
    })?;
    for iteration in 0..=opts.max_iterations {
        let norm = sup_norm(&r);
        if norm <= tol {
            return x0.with_coords(x);
        }
        if iteration == opts.max_iterations {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: norm,
            });
        }
        let jac = chart.jacobian_at(&x)?;
        let det = det_numeric(&jac);
        if !(det.abs() > opts.delta_det) {
            return Err(Error::SingularJacobian { det });
        }
        let step = jac
            .lu()
            .solve(&DVector::from_column_slice(&r))
            .ok_or(Error::SingularJacobian { det })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, si)| xi - lambda * si).collect();
            if let Some(rt) = residual(chart, &trial, target) {
                if sup_norm(&rt) < norm {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, rt)) => {
                x = trial;
                r = rt;
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations: iteration + 1,
                    residual: norm,
                })
            }
        }
    }
    unreachable!("loop returns on its final iteration")
}
