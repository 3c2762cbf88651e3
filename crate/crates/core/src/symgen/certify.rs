use nalgebra::DVector;
use serde::Serialize;

use super::field::{fd_jacobian, PointField, ScalarField};
use super::kernel::{KernelElement, KernelForm};
use super::mu::MuFactor;
use super::pullback::PulledBackField;
use crate::error::Result;
use crate::linearize::{sample_admissible_with, LinearizingChart, OsetCondition, SamplePlan};
use crate::symexpr::Point;
use crate::vcalc::{IntegrableSystem, ResidualReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// `‖[X, Y] − μ X‖∞ / (1 + ‖X‖∞)` per point.
    pub residual: ResidualReport,
    /// Largest gap between the bracket built from the exact `DY` and the one
    /// built from central differences, relative to `1 + ‖[X, Y]‖∞`.
    pub fd_agreement: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_mean: f64,
}

/// Evaluates `[X, Y] = DY·X − DX·Y` against `μ X` at every point.
pub fn symmetry_check(
    sys: &IntegrableSystem,
    y: &dyn PointField,
    mu: &dyn ScalarField,
    points: &[Point],
) -> Result<SymmetryReport> {
    let dx_sym = sys.field().jacobian();
    let mut residual = ResidualReport::default();
    let mut fd_agreement: f64 = 0.0;
    let (mut mu_min, mut mu_max, mut mu_sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for p in points {
        let x = p.coords();
        let xv = DVector::from_vec(sys.field().eval_at(x)?);
        let dx = dx_sym.eval_at(sys.vars(), x)?;
        let yv = DVector::from_vec(y.eval(x)?);
        let dy = y.jacobian(x)?;
        let m = mu.eval(x)?;
        let bracket = &dy * &xv - &dx * &yv;
        let gap = (&bracket - &xv * m).amax() / (1.0 + xv.amax());
        residual.push(gap, x);

        let dy_fd = fd_jacobian(y, x)?;
        let bracket_fd = dy_fd * &xv - &dx * &yv;
        let agreement = (&bracket - bracket_fd).amax() / (1.0 + bracket.amax());
        fd_agreement = fd_agreement.max(if agreement.is_nan() { f64::INFINITY } else { agreement });

        mu_min = mu_min.min(m);
        mu_max = mu_max.max(m);
        mu_sum += m;
    }
    let count = points.len().max(1) as f64;
    Ok(SymmetryReport {
        residual,
        fd_agreement,
        mu_min,
        mu_max,
        mu_mean: mu_sum / count,
    })
}

/// Outcome of lifting one kernel element to the source system.
#[derive(Debug, Clone)]
pub struct SymmetryCertificate {
    pub kernel: KernelElement,
    pub field: PulledBackField,
    pub mu: MuFactor,
    pub report: SymmetryReport,
    pub tolerance: f64,
    pub valid: bool,
    pub seed: u64,
    /// First sample point, a reproducible place to evaluate `Y` and `μ`.
    pub anchor: Vec<f64>,
}

impl SymmetryCertificate {
    pub fn y_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.field.eval(x)
    }

    pub fn mu_at(&self, x: &[f64]) -> Result<f64> {
        self.mu.eval_with(x, &self.field.eval(x)?)
    }

    pub fn describe_kernel(&self) -> String {
        match &self.kernel.form {
            KernelForm::Linear(a) => format!("linear {a:?}"),
            KernelForm::Expressions(c) => format!("({})", c.join(", ")),
        }
    }
}

/// Pulls `kernel` back through `chart`, samples `plan.count` admissible
/// points and marks the certificate valid when the residual stays within
/// the system's symmetry tolerance and `μ` is finite everywhere.
pub fn symmetry_certificate(
    sys: &IntegrableSystem,
    chart: &LinearizingChart,
    kernel: &KernelElement,
    plan: &SamplePlan,
) -> Result<SymmetryCertificate> {
    let oset = OsetCondition::new(sys)?;
    let points = sample_admissible_with(sys, &oset, chart, plan)?.points;
    let field = PulledBackField::new(chart.clone(), kernel.field.clone(), plan.delta_det)?;
    let mu = MuFactor::new(sys);
    let report = symmetry_check(sys, &field, &mu.bind(&field), &points)?;
    let tolerance = sys.tolerances().symmetry;
    let valid = report.residual.within(tolerance) && report.mu_min.is_finite() && report.mu_max.is_finite();
    Ok(SymmetryCertificate {
        kernel: kernel.clone(),
        field,
        mu,
        report,
        tolerance,
        valid,
        seed: plan.seed,
        anchor: points.first().map(|p| p.coords().to_vec()).unwrap_or_default(),
    })
}
