//! Pointwise verification of the hypotheses: conservation, independence and
//! the Hamilton-Poisson realization.

use serde::Serialize;

use super::brackets::{directional_derivative, hamiltonian_vector_field};
use super::det::det_numeric;
use super::field::jacobian_matrix;
use super::system::IntegrableSystem;
use crate::error::Result;
use crate::symexpr::{Expr, Point};

/// Residual statistics over a set of points. An empty report has `max = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
    /// Coordinates where the maximum was attained.
    pub worst: Option<Vec<f64>>,
    /// Points whose residual could not be evaluated; they count as infinite.
    pub failures: usize,
}

impl Default for ResidualReport {
    fn default() -> Self {
        ResidualReport {
            max: 0.0,
            mean: 0.0,
            count: 0,
            worst: None,
            failures: 0,
        }
    }
}

impl ResidualReport {
    pub fn push(&mut self, residual: f64, at: &[f64]) {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if residual.is_infinite() {
            self.failures += 1;
        }
        self.mean += (residual - self.mean) / (self.count + 1) as f64;
        self.count += 1;
        if self.worst.is_none() || residual > self.max {
            self.max = residual;
            self.worst = Some(at.to_vec());
        }
    }

    pub fn push_result(&mut self, residual: Result<f64>, at: &[f64]) {
        self.push(residual.unwrap_or(f64::INFINITY), at);
    }

    pub fn merge(&mut self, other: &ResidualReport) {
        if other.count == 0 {
            return;
        }
        let total = self.count + other.count;
        self.mean = (self.mean * self.count as f64 + other.mean * other.count as f64) / total as f64;
        if self.worst.is_none() || other.max > self.max {
            self.max = other.max;
            self.worst = other.worst.clone();
        }
        self.count = total;
        self.failures += other.failures;
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.failures == 0 && self.max <= tolerance
    }
}

/// `max_i |X_i - (X_H)_i| / (1 + |X_i|)` per point.
pub fn realization_check(sys: &IntegrableSystem, points: &[Point]) -> Result<ResidualReport> {
    let xh = hamiltonian_vector_field(sys)?;
    let mut report = ResidualReport::default();
    for p in points {
        let residual = (|| -> Result<f64> {
            let x = sys.field().eval_at(p.coords())?;
            let h = xh.eval_at(p.coords())?;
            Ok(x.iter()
                .zip(&h)
                .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
                .fold(0.0, f64::max))
        })();
        report.push_result(residual, p.coords());
    }
    Ok(report)
}

/// Residuals of `X(C_i)` and `X(H)`, one report per integral in order.
///
/// Each residual is normalized by `1 + Σ_i |X_i ∂f/∂x_i|`, the size of the
/// terms that must cancel.
pub fn conservation_check(sys: &IntegrableSystem, points: &[Point]) -> Vec<ResidualReport> {
    sys.integrals()
        .iter()
        .map(|f| {
            let derivative = directional_derivative(sys.field(), f);
            let terms: Vec<Expr> = sys
                .field()
                .components()
                .iter()
                .zip(sys.vars())
                .map(|(c, v)| c * &f.diff(v))
                .collect();
            let mut report = ResidualReport::default();
            for p in points {
                let residual = (|| -> Result<f64> {
                    let value = derivative.eval(p)?;
                    let mut scale = 0.0;
                    for t in &terms {
                        scale += t.eval(p)?.abs();
                    }
                    Ok(value.abs() / (1.0 + scale))
                })();
                report.push_result(residual, p.coords());
            }
            report
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Independence {
    pub independent: bool,
    /// Largest `|(n-1)-minor|` divided by the product of the row norms.
    pub minor_ratio: f64,
}

/// Rank test on the `(n-1) x n` Jacobian of `(C_1, …, C_{n-2}, H)` via its
/// best maximal minor.
pub fn independence_check(sys: &IntegrableSystem, point: &Point) -> Result<Independence> {
    let jac = jacobian_matrix(&sys.integrals(), sys.vars()).eval_at(point.vars(), point.coords())?;
    let rows = jac.nrows();
    let n = jac.ncols();
    let scale: f64 = (0..rows).map(|i| jac.row(i).norm()).product();
    if scale == 0.0 || !scale.is_finite() {
        return Ok(Independence {
            independent: false,
            minor_ratio: 0.0,
        });
    }
    let best = (0..n)
        .map(|dropped| {
            let keep: Vec<usize> = (0..n).filter(|&j| j != dropped).collect();
            det_numeric(&jac.select_columns(&keep)).abs()
        })
        .fold(0.0, f64::max);
    let minor_ratio = best / scale;
    Ok(Independence {
        independent: minor_ratio > sys.tolerances().rank,
        minor_ratio,
    })
}
